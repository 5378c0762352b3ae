"""Parsing strategies for code-mixed sentences built from monolingual parsers.

``monolingual``   one parser, chosen by the sentence's matrix language (baseline)
``interpolated``  both parsers, softmax outputs mixed per configuration
``multilingual``  one parser trained on both treebanks with language-tag inputs
``multipass``     fragments parsed by their own parser, then joined by the matrix parser
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import arceager
from .arceager import Configuration, extract_parse_features, greedy_parse, parse_with_scorer
from .conllu import Sentence
from .network import FeedForwardModel
from .segment import Segmentation, resolve_languages, segment_fragments

MATRIX_POS = frozenset({"ADP", "AUX", "PART", "VERB"})
STRATEGIES = ("monolingual", "interpolated", "multilingual", "multipass-f", "multipass-s")
FRAGMENT_WISE, SUBORDINATE_FIRST = "fragment_wise", "subordinate_first"


class IncompatibleModels(ValueError):
    pass


@dataclass(frozen=True)
class InterpolationConfig:
    lambda_m: float = 0.75
    pos_set: frozenset = field(default=MATRIX_POS)

    def __post_init__(self):
        if not 0.0 <= self.lambda_m <= 1.0:
            raise ValueError(f"lambda_m must lie in [0, 1], got {self.lambda_m}")


def check_compatible(models: Mapping[str, FeedForwardModel]) -> None:
    """Interpolation needs identical transition inventories in the same order."""
    hi, en = models["hi"], models["en"]
    if hi.labels != en.labels:
        only_hi = sorted(set(hi.labels) - set(en.labels))
        only_en = sorted(set(en.labels) - set(hi.labels))
        raise IncompatibleModels(
            f"transition inventories differ (hi only: {only_hi[:5]}, en only: {only_en[:5]})")


def parse_monolingual_baseline(models: Mapping[str, FeedForwardModel], sentence: Sentence,
                               seg: Optional[Segmentation] = None) -> Sentence:
    seg = seg or segment_fragments(sentence)
    return greedy_parse(models[seg.matrix_language], sentence)


def configuration_matrix_language(c: Configuration, sentence: Sentence, seg: Segmentation,
                                  pos_set=MATRIX_POS) -> str:
    """Majority language of the top-2 stack and buffer nodes whose POS is in ``pos_set``."""
    nodes = [n for n in c.stack[-2:] if n != 0] + c.buffer[:2]
    votes = {"hi": 0, "en": 0}
    for n in nodes:
        if sentence.tokens[n - 1].upos in pos_set:
            votes[seg.token_langs[n - 1]] += 1
    if votes["hi"] > votes["en"]:
        return "hi"
    if votes["en"] > votes["hi"]:
        return "en"
    return seg.matrix_language


def interpolated_scorer(models: Mapping[str, FeedForwardModel], sentence: Sentence,
                        seg: Segmentation, cfg: InterpolationConfig):
    lam = cfg.lambda_m

    def score(c: Configuration) -> np.ndarray:
        matrix = configuration_matrix_language(c, sentence, seg, cfg.pos_set)
        sub = "en" if matrix == "hi" else "hi"
        feats = extract_parse_features(c, sentence, seg.token_langs)
        return lam * models[matrix].forward(feats) + (1.0 - lam) * models[sub].forward(feats)

    return score


def parse_interpolated(models: Mapping[str, FeedForwardModel], sentence: Sentence,
                       cfg: InterpolationConfig = InterpolationConfig(),
                       seg: Optional[Segmentation] = None) -> Sentence:
    check_compatible(models)
    seg = seg or segment_fragments(sentence)
    return parse_with_scorer(sentence, models["hi"].labels,
                             interpolated_scorer(models, sentence, seg, cfg))


def parse_multilingual(model: FeedForwardModel, sentence: Sentence,
                       seg: Optional[Segmentation] = None) -> Sentence:
    langs = seg.token_langs if seg is not None else resolve_languages(sentence)
    return greedy_parse(model, sentence, langs)


def _sub_sentence(sentence: Sentence, indices: Sequence[int]) -> Sentence:
    """Standalone sentence of the given 1-based token indices, renumbered from 1."""
    tokens = []
    for new, old in enumerate(indices, start=1):
        tok = sentence.tokens[old - 1]
        tokens.append(type(tok)(**{**tok.__dict__, "index": new, "head": None,
                                   "deprel": "", "misc": dict(tok.misc)}))
    return Sentence(tokens, sentence.sent_id)


def _parse_piece(model: FeedForwardModel, sentence: Sentence, indices: Sequence[int],
                 heads: dict, labels: dict) -> int:
    """Parse a sub-sentence and install its arcs; returns the original index of its root."""
    parsed = greedy_parse(model, _sub_sentence(sentence, indices))
    root = None
    for tok in parsed.tokens:
        orig = indices[tok.index - 1]
        if tok.head == 0:
            root = orig
            heads[orig], labels[orig] = 0, tok.deprel
        else:
            heads[orig], labels[orig] = indices[tok.head - 1], tok.deprel
    return root


def parse_multipass(models: Mapping[str, FeedForwardModel], sentence: Sentence,
                    seg: Optional[Segmentation] = None, mode: str = FRAGMENT_WISE) -> Sentence:
    seg = seg or segment_fragments(sentence)
    matrix = seg.matrix_language
    heads: dict = {}
    labels: dict = {}
    if mode == FRAGMENT_WISE:
        first_pass = list(seg.fragments)
        second = []
    elif mode == SUBORDINATE_FIRST:
        first_pass = [f for f in seg.fragments if f.lang != matrix]
        second = [i for f in seg.fragments if f.lang == matrix for i in f.indices]
    else:
        raise ValueError(f"unknown multipass mode {mode!r}")

    roots = [_parse_piece(models[f.lang], sentence, list(f.indices), heads, labels)
             for f in first_pass]
    reduced = sorted(second + roots)
    # a lone fragment root has nothing to join; otherwise the second pass
    # overwrites the fragment roots' ROOT attachments
    if len(reduced) > 1 or second:
        _parse_piece(models[matrix], sentence, reduced, heads, labels)

    out = sentence.copy()
    for tok in out.tokens:
        tok.head = heads[tok.index]
        tok.deprel = labels[tok.index]
    return out


def parse(strategy: str, sentence: Sentence, models: Mapping[str, FeedForwardModel],
          multilingual: Optional[FeedForwardModel] = None,
          cfg: InterpolationConfig = InterpolationConfig()) -> Sentence:
    """Dispatch on a strategy name from ``STRATEGIES``."""
    seg = segment_fragments(sentence)
    if strategy == "monolingual":
        return parse_monolingual_baseline(models, sentence, seg)
    if strategy == "interpolated":
        return parse_interpolated(models, sentence, cfg, seg)
    if strategy == "multilingual":
        if multilingual is None:
            raise ValueError("the multilingual strategy needs a multilingual parser model")
        return parse_multilingual(multilingual, sentence, seg)
    if strategy == "multipass-f":
        return parse_multipass(models, sentence, seg, FRAGMENT_WISE)
    if strategy == "multipass-s":
        return parse_multipass(models, sentence, seg, SUBORDINATE_FIRST)
    raise ValueError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")
