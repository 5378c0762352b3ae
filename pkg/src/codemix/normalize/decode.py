"""Sentence-level choice among per-token candidates under a trigram LM.

The search is exact: a Viterbi pass over states holding the last two choices
scores every one of the b^n sequences implicitly.
"""
from __future__ import annotations

from typing import Sequence

from .lm import BOS, EOS


def sequence_score(lm, words: Sequence[str], eos: bool = True) -> float:
    """Sum of log p(w_i | w_{i-2} w_{i-1}), accumulated left to right."""
    hist = [BOS]
    total = 0.0
    for w in words:
        total = total + lm.logprob(w, hist[-2:])
        hist.append(w)
    if eos:
        total = total + lm.logprob(EOS, hist[-2:])
    return total


def decode_ranks(lattice: Sequence[Sequence[str]], lm, eos: bool = True) -> tuple:
    """Candidate index per token of the best-scoring sequence.

    Ties go to the lexicographically smallest tuple of candidate ranks.
    """
    if not lattice:
        return ()
    for i, cands in enumerate(lattice):
        if not cands:
            raise ValueError(f"token {i + 1} has no candidates")
    # state: (rank of w_{i-1} or None, rank of w_i) -> (score, ranks)
    states = {}
    for j, w in enumerate(lattice[0]):
        states[(None, j)] = (lm.logprob(w, [BOS]), (j,))
    for i in range(1, len(lattice)):
        nxt = {}
        for (a, b), (score, ranks) in states.items():
            hist = [lattice[i - 2][a] if a is not None else BOS, lattice[i - 1][b]]
            for c, w in enumerate(lattice[i]):
                cand = (score + lm.logprob(w, hist), ranks + (c,))
                key = (b, c)
                if key not in nxt or _better(cand, nxt[key]):
                    nxt[key] = cand
        states = nxt
    best = None
    for (a, b), (score, ranks) in states.items():
        if eos:
            hist = [lattice[-2][a] if a is not None else BOS, lattice[-1][b]]
            score = score + lm.logprob(EOS, hist)
        cand = (score, ranks)
        if best is None or _better(cand, best):
            best = cand
    return best[1]


def _better(x: tuple, y: tuple) -> bool:
    return x[0] > y[0] or (x[0] == y[0] and x[1] < y[1])


def decode_sentence(lattice: Sequence[Sequence[str]], lm, eos: bool = True) -> list:
    ranks = decode_ranks(lattice, lm, eos)
    return [lattice[i][j] for i, j in enumerate(ranks)]

