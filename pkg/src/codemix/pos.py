"""Greedy left-to-right POS tagging, fragment-wise (monolingual) or with a language vector (multilingual)."""
from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .conllu import Sentence
from .embeddings import AFFIX_DIM, POS_DIM, WORD_DIM, EmbeddingTable
from .network import NULL, FeedForwardModel, language_table, make_table
from .segment import Segmentation, resolve_languages, segment_fragments

BOS, EOS = "<s>", "</s>"
WINDOW = 2
SUFFIX_LEN = 3


def _word(tok) -> str:
    return tok.norm.lower()


def pos_features(words: Sequence[str], i: int, prev_tags: Sequence[str],
                 lang: Optional[str] = None) -> dict:
    """Features of position ``i``; ``prev_tags`` holds the tags already assigned left of i."""
    feats = {}
    for off in range(-WINDOW, WINDOW + 1):
        j = i + off
        if j < 0:
            w = BOS
        elif j >= len(words):
            w = EOS
        else:
            w = words[j]
        feats[f"w{off:+d}"] = w
    feats["t-1"] = prev_tags[i - 1] if i >= 1 else BOS
    feats["t-2"] = prev_tags[i - 2] if i >= 2 else BOS
    feats["suf3"] = words[i][-SUFFIX_LEN:]
    feats["lang"] = lang or NULL
    return feats


def pos_slots(use_lang: bool) -> list:
    slots = [(f"w{off:+d}", "word") for off in range(-WINDOW, WINDOW + 1)]
    slots += [("t-1", "pos"), ("t-2", "pos"), ("suf3", "affix")]
    if use_lang:
        slots.append(("lang", "lang"))
    return slots


def training_examples(corpus: Iterable[Sentence], use_lang: bool = False,
                      default_lang: Optional[str] = None) -> list:
    """Teacher-forced examples: previous-tag features use gold tags."""
    examples = []
    for sent in corpus:
        words = [_word(t) for t in sent.tokens]
        tags = [t.upos for t in sent.tokens]
        langs = resolve_languages(sent, default_lang) if use_lang else [None] * len(sent)
        for i, tag in enumerate(tags):
            if not tag:
                raise ValueError(f"sentence {sent.sent_id or '?'} token {i + 1} has no UPOS")
            examples.append((pos_features(words, i, tags, langs[i]), tag))
    return examples


def build_pos_model(examples: Sequence[tuple], use_lang: bool = False, hidden_size: int = 200,
                    seed: int = 0, word_vectors: Optional[EmbeddingTable] = None) -> FeedForwardModel:
    words, suffixes, tags = set(), set(), set()
    for feats, tag in examples:
        words.update(feats[f"w{off:+d}"] for off in range(-WINDOW, WINDOW + 1))
        suffixes.add(feats["suf3"])
        tags.add(tag)
    labels = sorted(tags)
    tables = {
        "word": make_table("word", words, WORD_DIM, seed + 1, word_vectors),
        "pos": make_table("pos", set(labels) | {BOS}, POS_DIM, seed + 2),
        "affix": make_table("affix", suffixes, AFFIX_DIM, seed + 3),
    }
    if use_lang:
        tables["lang"] = language_table()
    return FeedForwardModel(tables, pos_slots(use_lang), labels, hidden_size=hidden_size,
                            seed=seed, meta={"kind": "pos", "use_lang": use_lang})


def tag_span(model: FeedForwardModel, words: Sequence[str],
             langs: Optional[Sequence[str]] = None) -> list:
    tags: list = []
    for i in range(len(words)):
        feats = pos_features(words, i, tags, langs[i] if langs is not None else None)
        tags.append(model.labels[int(np.argmax(model.forward(feats)))])
    return tags


def tag_pos_monolingual(models: Mapping[str, FeedForwardModel], sentence: Sentence,
                        segmentation: Optional[Segmentation] = None) -> Sentence:
    """Tag each same-language fragment on its own with that language's tagger."""
    seg = segmentation or segment_fragments(sentence)
    out = sentence.copy()
    words = [_word(t) for t in sentence.tokens]
    for frag in seg.fragments:
        if frag.lang not in models:
            raise ValueError(f"no POS model for fragment language {frag.lang!r}")
        tags = tag_span(models[frag.lang], words[frag.start - 1:frag.end])
        for idx, tag in zip(frag.indices, tags):
            out.tokens[idx - 1].upos = tag
    return out


def tag_pos_multilingual(model: FeedForwardModel, sentence: Sentence,
                         segmentation: Optional[Segmentation] = None) -> Sentence:
    seg = segmentation or segment_fragments(sentence)
    out = sentence.copy()
    tags = tag_span(model, [_word(t) for t in sentence.tokens], seg.token_langs)
    for tok, tag in zip(out.tokens, tags):
        tok.upos = tag
    return out
