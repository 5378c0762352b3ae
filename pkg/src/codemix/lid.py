"""Token-level language identification over {hi, en, acro, ne, univ}."""
from __future__ import annotations

import string
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .conllu import LANGS, Sentence
from .embeddings import AFFIX_DIM, WORD_DIM, EmbeddingTable
from .network import FeedForwardModel, make_table

BOS, EOS = "<s>", "</s>"
MAX_AFFIX = 4
SHAPE_DIM = 20


@dataclass(frozen=True)
class LidExample:
    form: str
    lower: str
    prefixes: tuple
    suffixes: tuple
    prev_word: str
    next_word: str
    has_digit: bool
    has_punct: bool
    is_capitalized: bool

    def features(self) -> dict:
        feats = {
            "w": self.form,
            "lw": self.lower,
            "prev": self.prev_word.lower(),
            "next": self.next_word.lower(),
            "digit": f"digit={int(self.has_digit)}",
            "punct": f"punct={int(self.has_punct)}",
            "cap": f"cap={int(self.is_capitalized)}",
        }
        for k in range(MAX_AFFIX):
            feats[f"pre{k + 1}"] = "^" + self.prefixes[k]
            feats[f"suf{k + 1}"] = self.suffixes[k] + "$"
        return feats


def _is_punct(ch: str) -> bool:
    return ch in string.punctuation or unicodedata.category(ch).startswith("P")


def extract_lid_features(sentence: Sentence, position: int) -> LidExample:
    form = sentence.tokens[position].form
    lower = form.lower()
    # affixes shorter than k repeat the whole word; no padding symbol needed
    prefixes = tuple(lower[:k] for k in range(1, MAX_AFFIX + 1))
    suffixes = tuple(lower[-k:] for k in range(1, MAX_AFFIX + 1))
    prev_word = sentence.tokens[position - 1].form if position > 0 else BOS
    next_word = sentence.tokens[position + 1].form if position + 1 < len(sentence) else EOS
    return LidExample(
        form=form, lower=lower, prefixes=prefixes, suffixes=suffixes,
        prev_word=prev_word, next_word=next_word,
        has_digit=any(ch.isdigit() for ch in form),
        has_punct=any(_is_punct(ch) for ch in form),
        is_capitalized=form[:1].isupper(),
    )


def lid_slots() -> list:
    slots = [("w", "word"), ("lw", "word"), ("prev", "word"), ("next", "word")]
    slots += [(f"pre{k}", "affix") for k in range(1, MAX_AFFIX + 1)]
    slots += [(f"suf{k}", "affix") for k in range(1, MAX_AFFIX + 1)]
    slots += [("digit", "shape"), ("punct", "shape"), ("cap", "shape")]
    return slots


def training_examples(corpus: Iterable[Sentence]) -> list:
    examples = []
    for sent in corpus:
        for i, tok in enumerate(sent.tokens):
            if tok.lang is None:
                raise ValueError(f"sentence {sent.sent_id or '?'} token {tok.index} has no Lang tag")
            examples.append((extract_lid_features(sent, i).features(), tok.lang))
    return examples


def build_lid_model(examples: Sequence[tuple], hidden_size: int = 200, seed: int = 0,
                    word_vectors: Optional[EmbeddingTable] = None) -> FeedForwardModel:
    words, affixes = set(), set()
    for feats, _ in examples:
        words.update((feats["w"], feats["lw"], feats["prev"], feats["next"]))
        affixes.update(v for k, v in feats.items() if k.startswith(("pre", "suf")))
    shapes = [f"{n}={v}" for n in ("digit", "punct", "cap") for v in (0, 1)]
    tables = {
        "word": make_table("word", words, WORD_DIM, seed + 1, word_vectors),
        "affix": make_table("affix", affixes, AFFIX_DIM, seed + 2),
        "shape": make_table("shape", shapes, SHAPE_DIM, seed + 3),
    }
    return FeedForwardModel(tables, lid_slots(), LANGS, hidden_size=hidden_size, seed=seed,
                            meta={"kind": "lid"})


def tag_languages(model: FeedForwardModel, sentence: Sentence) -> Sentence:
    """Set ``lang`` on every token by independent argmax (ties -> label order)."""
    out = sentence.copy()
    if not len(sentence):
        return out
    feats = [extract_lid_features(sentence, i).features() for i in range(len(sentence))]
    probs = model.probabilities(model.encode_batch(feats))
    for tok, p in zip(out.tokens, probs):
        tok.lang = model.labels[int(np.argmax(p))]
    return out
