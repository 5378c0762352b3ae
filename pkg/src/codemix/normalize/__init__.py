"""Normalization and back-transliteration of code-mixed tokens."""
from __future__ import annotations

from typing import Mapping, Optional

from ..conllu import Sentence
from .align import align, align_pairs, refine_alignments
from .decode import decode_sentence
from .lm import ArpaLM, TrigramLM, read_arpa, train_lm
from .noise import generate_noisy_pairs, load_confusions
from .transducer import BEAM_WIDTH, TransducerModel, kbest_transduce, train_transducer

__all__ = [
    "align", "align_pairs", "refine_alignments", "decode_sentence", "ArpaLM", "TrigramLM",
    "read_arpa", "train_lm", "generate_noisy_pairs", "load_confusions", "TransducerModel",
    "kbest_transduce", "train_transducer", "build_lattice", "normalize_sentence",
]


def build_lattice(sentence: Sentence, transducers: Mapping[str, TransducerModel],
                  b: int = BEAM_WIDTH) -> list:
    """Candidate list per token; tokens outside hi/en, or without a model, keep their form."""
    lattice = []
    for tok in sentence.tokens:
        model = transducers.get(tok.lang) if tok.lang in ("hi", "en") else None
        cands = [c for c, _ in kbest_transduce(model, tok.form.lower(), b)] if model else []
        lattice.append(cands or [tok.form])
    return lattice


def normalize_sentence(sentence: Sentence, transducers: Mapping[str, TransducerModel],
                       lm=None, b: int = BEAM_WIDTH) -> Sentence:
    """Set ``norm`` on every token: LM-decoded over the k-best lattice, or first-best without an LM."""
    lattice = build_lattice(sentence, transducers, b)
    if lm is not None:
        chosen = decode_sentence(lattice, lm)
    else:
        chosen = [c[0] for c in lattice]
    out = sentence.copy()
    for tok, norm in zip(out.tokens, chosen):
        tok.norm = norm
    return out
