"""CoNLL-U reading and writing with token-level language tags.

The language tag of a token lives in the MISC column as ``Lang=<tag>`` and a
normalized (or back-transliterated) form, when it differs from FORM, as
``Norm=<form>``.  Multiword-token ranges and empty nodes are not supported.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Optional, TextIO

LANGS = ("hi", "en", "acro", "ne", "univ")
MIXED_LANGS = ("hi", "en")

_MISC_LANG = "Lang"
_MISC_NORM = "Norm"


class ConlluError(ValueError):
    """Malformed or invalid CoNLL-U input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class Token:
    index: int
    form: str
    norm: str = ""
    lemma: str = ""
    upos: str = ""
    xpos: str = ""
    feats: str = ""
    head: Optional[int] = None
    deprel: str = ""
    deps: str = ""
    lang: Optional[str] = None
    misc: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.norm:
            self.norm = self.form

    @property
    def borrowed(self) -> bool:
        return self.misc.get("Borrowed") == "Yes"


@dataclass
class Sentence:
    tokens: list
    sent_id: str = ""
    raw_text: str = ""
    comments: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    @property
    def forms(self) -> list:
        return [t.form for t in self.tokens]

    @property
    def langs(self) -> list:
        return [t.lang for t in self.tokens]

    @property
    def heads(self) -> list:
        return [t.head for t in self.tokens]

    def copy(self) -> "Sentence":
        tokens = [
            Token(**{**t.__dict__, "misc": dict(t.misc)}) for t in self.tokens
        ]
        return Sentence(tokens, self.sent_id, self.raw_text, list(self.comments))

    @classmethod
    def from_forms(cls, forms: Iterable[str], langs: Optional[Iterable] = None,
                   sent_id: str = "") -> "Sentence":
        forms = list(forms)
        langs = list(langs) if langs is not None else [None] * len(forms)
        tokens = [Token(i + 1, f, lang=l) for i, (f, l) in enumerate(zip(forms, langs))]
        return cls(tokens, sent_id=sent_id, raw_text=" ".join(forms))


def _blank(value: str) -> str:
    return "" if value == "_" else value


def _parse_misc(raw: str, lineno: int):
    misc: dict = {}
    lang = norm = None
    if raw in ("", "_"):
        return misc, lang, norm
    for item in raw.split("|"):
        key, sep, value = item.partition("=")
        if key == _MISC_LANG:
            tag = value.lower()
            if tag not in LANGS:
                raise ConlluError(f"unknown language tag {value!r}", lineno)
            lang = tag
        elif key == _MISC_NORM:
            norm = value
        else:
            misc[key] = value if sep else None
    return misc, lang, norm


def _format_misc(token: Token) -> str:
    items = []
    if token.lang is not None:
        items.append(f"{_MISC_LANG}={token.lang}")
    if token.norm and token.norm != token.form:
        items.append(f"{_MISC_NORM}={token.norm}")
    for key, value in token.misc.items():
        items.append(key if value is None else f"{key}={value}")
    return "|".join(items) if items else "_"


def _parse_token(line: str, lineno: int, expected_index: int) -> Token:
    cols = line.split("\t")
    if len(cols) != 10:
        raise ConlluError(f"expected 10 tab-separated columns, found {len(cols)}", lineno)
    tid, form, lemma, upos, xpos, feats, head, deprel, deps, misc = cols
    if "-" in tid or "." in tid:
        raise ConlluError(f"multiword tokens and empty nodes are not supported ({tid})", lineno)
    try:
        index = int(tid)
    except ValueError:
        raise ConlluError(f"invalid token id {tid!r}", lineno) from None
    if index != expected_index:
        raise ConlluError(f"token id {index} out of sequence (expected {expected_index})", lineno)
    if head == "_":
        head_value = None
    else:
        try:
            head_value = int(head)
        except ValueError:
            raise ConlluError(f"invalid head {head!r}", lineno) from None
    extra, lang, norm = _parse_misc(misc, lineno)
    return Token(
        index=index, form=form, norm=norm or form, lemma=_blank(lemma),
        upos=_blank(upos), xpos=_blank(xpos), feats=_blank(feats),
        head=head_value, deprel=_blank(deprel), deps=_blank(deps),
        lang=lang, misc=extra,
    )


def validate_tree(sentence: Sentence, lineno: Optional[int] = None) -> None:
    """Check head ranges and acyclicity for the tokens whose heads are set."""
    n = len(sentence)
    heads = sentence.heads
    for tok in sentence.tokens:
        if tok.head is None:
            continue
        if not 0 <= tok.head <= n:
            raise ConlluError(
                f"sentence {sentence.sent_id or '?'}: head {tok.head} of token {tok.index} out of range",
                lineno)
        if tok.head == tok.index:
            raise ConlluError(
                f"sentence {sentence.sent_id or '?'}: token {tok.index} is its own head", lineno)
    for start in range(1, n + 1):
        seen = set()
        node = start
        while node not in (0, None):
            if node in seen:
                raise ConlluError(
                    f"sentence {sentence.sent_id or '?'}: cyclic heads through token {node}", lineno)
            seen.add(node)
            node = heads[node - 1]


def read_conllu(stream: TextIO | str) -> list:
    """Parse CoNLL-U text (a stream or a string) into sentences."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    sentences = []
    tokens: list = []
    comments: list = []
    sent_id = raw_text = ""
    start_line = 1

    def flush():
        nonlocal tokens, comments, sent_id, raw_text
        if tokens:
            sent = Sentence(tokens, sent_id, raw_text, comments)
            validate_tree(sent, start_line)
            sentences.append(sent)
        elif comments or sent_id or raw_text:
            raise ConlluError("comment block without tokens", start_line)
        tokens, comments, sent_id, raw_text = [], [], "", ""

    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip():
            flush()
            continue
        if not tokens and not comments and not sent_id and not raw_text:
            start_line = lineno
        if line.startswith("#"):
            if tokens:
                raise ConlluError("comment inside token block", lineno)
            body = line[1:].strip()
            key, sep, value = body.partition("=")
            if sep and key.strip() == "sent_id":
                sent_id = value.strip()
            elif sep and key.strip() == "text":
                raw_text = value.strip()
            else:
                comments.append(body)
            continue
        tokens.append(_parse_token(line, lineno, len(tokens) + 1))
    flush()
    return sentences


def format_sentence(sentence: Sentence) -> str:
    lines = []
    if sentence.sent_id:
        lines.append(f"# sent_id = {sentence.sent_id}")
    if sentence.raw_text:
        lines.append(f"# text = {sentence.raw_text}")
    lines.extend(f"# {c}" for c in sentence.comments)
    for t in sentence.tokens:
        cols = [
            str(t.index), t.form, t.lemma or "_", t.upos or "_", t.xpos or "_",
            t.feats or "_", "_" if t.head is None else str(t.head),
            t.deprel or "_", t.deps or "_", _format_misc(t),
        ]
        lines.append("\t".join(cols))
    return "\n".join(lines) + "\n"


def write_conllu(sentences: Iterable[Sentence], stream: Optional[TextIO] = None) -> str:
    text = "".join(format_sentence(s) + "\n" for s in sentences)
    if stream is not None:
        stream.write(text)
    return text


def load(path) -> list:
    with open(path, encoding="utf-8") as f:
        return read_conllu(f)


def save(sentences: Iterable[Sentence], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        write_conllu(sentences, f)


def mixing_ratio(corpus: Iterable[Sentence]) -> float:
    """Mean over sentences of the Hindi share among Hindi and English tokens.

    Tokens tagged acro/ne/univ and tokens flagged ``Borrowed=Yes`` are left
    out of both counts.
    """
    total = 0.0
    n = 0
    for sent in corpus:
        hi = sum(1 for t in sent.tokens if t.lang == "hi" and not t.borrowed)
        en = sum(1 for t in sent.tokens if t.lang == "en" and not t.borrowed)
        if hi + en == 0:
            raise ValueError(f"sentence {sent.sent_id or n + 1} has no Hindi or English tokens")
        total += hi / (hi + en)
        n += 1
    if n == 0:
        raise ValueError("mixing ratio of an empty corpus is undefined")
    return total / n
