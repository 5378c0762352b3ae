"""Monotone character alignment of transliteration pairs.

Unit-cost edit distance gives the initial alignment; ``refine_alignments``
re-estimates operation costs from aligned counts (a few hard-EM rounds), which
matters when source and target scripts share no characters.
"""
from __future__ import annotations

import math
from collections import Counter
from typing import Callable, NamedTuple, Optional, Sequence

SUB, INS, DEL = "S", "I", "D"


class Edit(NamedTuple):
    op: str
    src: str
    tgt: str

    @property
    def is_match(self) -> bool:
        return self.op == SUB and self.src == self.tgt


def unit_sub(s: str, t: str) -> float:
    return 0.0 if s == t else 1.0


def unit_indel(_: str) -> float:
    return 1.0


_EPS = 1e-9


def align(source: str, target: str,
          sub_cost: Callable[[str, str], float] = unit_sub,
          ins_cost: Callable[[str], float] = unit_indel,
          del_cost: Callable[[str], float] = unit_indel) -> list:
    """Minimum-cost monotone alignment; ties prefer substitution, then insertion, then deletion."""
    if not source or not target:
        raise ValueError("cannot align an empty word")
    n, m = len(source), len(target)
    cost = [[0.0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        cost[i][0] = cost[i - 1][0] + del_cost(source[i - 1])
    for j in range(1, m + 1):
        cost[0][j] = cost[0][j - 1] + ins_cost(target[j - 1])
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost[i][j] = min(
                cost[i - 1][j - 1] + sub_cost(source[i - 1], target[j - 1]),
                cost[i][j - 1] + ins_cost(target[j - 1]),
                cost[i - 1][j] + del_cost(source[i - 1]),
            )
    edits = []
    i, j = n, m
    while i > 0 or j > 0:
        here = cost[i][j]
        if i > 0 and j > 0 and abs(cost[i - 1][j - 1] + sub_cost(source[i - 1], target[j - 1]) - here) < _EPS:
            edits.append(Edit(SUB, source[i - 1], target[j - 1]))
            i, j = i - 1, j - 1
        elif j > 0 and abs(cost[i][j - 1] + ins_cost(target[j - 1]) - here) < _EPS:
            edits.append(Edit(INS, "", target[j - 1]))
            j -= 1
        else:
            edits.append(Edit(DEL, source[i - 1], ""))
            i -= 1
    edits.reverse()
    return edits


def align_pairs(pairs: Sequence[tuple], **costs) -> list:
    return [align(s, t, **costs) for s, t in pairs]


def _costs_from(alignments: Sequence[list], smoothing: float = 0.1):
    sub = Counter()
    src_total = Counter()
    ins = Counter()
    n_ins = 0
    n_ops = 0
    targets = set()
    for edits in alignments:
        for e in edits:
            n_ops += 1
            if e.op == INS:
                ins[e.tgt] += 1
                n_ins += 1
                targets.add(e.tgt)
            else:
                sub[(e.src, e.tgt)] += 1
                src_total[e.src] += 1
                if e.tgt:
                    targets.add(e.tgt)
    n_out = len(targets) + 1  # +1 for deletion

    def sub_cost(s: str, t: str) -> float:
        return -math.log((sub[(s, t)] + smoothing) / (src_total[s] + smoothing * n_out))

    def del_cost(s: str) -> float:
        return sub_cost(s, "")

    p_ins = (n_ins + smoothing) / (n_ops + 2 * smoothing)

    def ins_cost(t: str) -> float:
        p_t = (ins[t] + smoothing) / (n_ins + smoothing * max(len(targets), 1))
        return -math.log(p_ins * p_t)

    return sub_cost, ins_cost, del_cost


def refine_alignments(pairs: Sequence[tuple], iterations: int = 3,
                      initial: Optional[list] = None) -> list:
    alignments = initial if initial is not None else align_pairs(pairs)
    for _ in range(iterations):
        sub_cost, ins_cost, del_cost = _costs_from(alignments)
        alignments = [align(s, t, sub_cost, ins_cost, del_cost) for s, t in pairs]
    return alignments
