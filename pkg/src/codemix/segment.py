"""Fragment segmentation and matrix-language identification."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .conllu import MIXED_LANGS, Sentence


@dataclass(frozen=True)
class Fragment:
    start: int  # 1-based, inclusive
    end: int  # 1-based, inclusive
    lang: str

    def __len__(self) -> int:
        return self.end - self.start + 1

    @property
    def indices(self) -> range:
        return range(self.start, self.end + 1)


@dataclass(frozen=True)
class Segmentation:
    fragments: tuple
    matrix_language: str
    token_langs: tuple  # resolved hi/en language per token (0-based)

    @property
    def subordinate_language(self) -> str:
        return "en" if self.matrix_language == "hi" else "hi"

    def fragment_of(self, index: int) -> int:
        for k, frag in enumerate(self.fragments):
            if frag.start <= index <= frag.end:
                return k
        raise IndexError(index)


def matrix_language(tags: Sequence[str]) -> str:
    """Language with the strict majority of hi/en tokens; ties go to hi."""
    hi = sum(1 for t in tags if t == "hi")
    en = sum(1 for t in tags if t == "en")
    return "en" if en > hi else "hi"


def segment_fragments(sentence: Sentence) -> Segmentation:
    tags = [t.lang for t in sentence.tokens]
    if not any(t in MIXED_LANGS for t in tags):
        raise ValueError(
            f"sentence {sentence.sent_id or '?'} has no hi/en token to anchor fragments")
    resolved = list(tags)
    first = next(t for t in tags if t in MIXED_LANGS)
    current = first
    for i, tag in enumerate(tags):
        if tag in MIXED_LANGS:
            current = tag
        else:
            resolved[i] = current
    fragments = []
    start = 1
    for i in range(1, len(resolved) + 1):
        if i == len(resolved) or resolved[i] != resolved[start - 1]:
            fragments.append(Fragment(start, i, resolved[start - 1]))
            start = i + 1
    return Segmentation(tuple(fragments), matrix_language(tags), tuple(resolved))


def resolve_languages(sentence: Sentence, default: str | None = None) -> tuple:
    """Per-token hi/en language through fragments.

    A sentence without any hi/en tag (e.g. a monolingual treebank lacking
    ``Lang=``) takes ``default`` for every token.
    """
    if default is not None and not any(t.lang in MIXED_LANGS for t in sentence.tokens):
        return (default,) * len(sentence)
    return segment_fragments(sentence).token_langs
