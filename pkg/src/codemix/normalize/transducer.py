"""Character transducer trained as an averaged structured perceptron.

A derivation is a sequence of actions over the source word, left to right:
substitute the current source character by a target character (``S``),
delete it (``D``), insert a target character without consuming input
(``I``, at most ``max_insertions`` in a row), and finally ``END``.  Actions
are scored by a linear model over conjunctions of the action with the
source character window and the previously emitted target characters.
Candidate actions come from the character alignments of the training pairs;
a source character never seen in training can only be copied.
"""
from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence, TextIO

from .align import DEL, INS, SUB, Edit, refine_alignments

log = logging.getLogger(__name__)

END = "END"
BOW, EOW = "<w>", "</w>"
BEAM_WIDTH = 5
MAX_INSERTIONS = 2
FORMAT = "codemix-transducer"
FORMAT_VERSION = 1


class Action(NamedTuple):
    op: str
    src: str = ""
    tgt: str = ""

    def key(self) -> str:
        return f"{self.op}:{self.src}>{self.tgt}"


END_ACTION = Action(END)


@dataclass
class TransducerModel:
    weights: dict = field(default_factory=dict)
    substitutions: dict = field(default_factory=dict)  # source char -> sorted target chars
    deletable: frozenset = frozenset()
    insertions: tuple = ()
    max_insertions: int = MAX_INSERTIONS

    @property
    def source_alphabet(self) -> set:
        return set(self.substitutions) | set(self.deletable)

    @property
    def target_alphabet(self) -> set:
        return {t for ts in self.substitutions.values() for t in ts} | set(self.insertions)

    def score(self, feats: Iterable[str]) -> float:
        w = self.weights
        return sum(w.get(f, 0.0) for f in feats)

    # -- persistence ---------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "format": FORMAT,
            "version": FORMAT_VERSION,
            "max_insertions": self.max_insertions,
            "substitutions": self.substitutions,
            "deletable": sorted(self.deletable),
            "insertions": list(self.insertions),
            "weights": self.weights,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TransducerModel":
        if data.get("format") != FORMAT:
            raise ValueError(f"not a transducer model: expected format {FORMAT!r}")
        if data.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported transducer model version {data.get('version')}")
        return cls(
            weights={k: float(v) for k, v in data["weights"].items()},
            substitutions={k: list(v) for k, v in data["substitutions"].items()},
            deletable=frozenset(data["deletable"]),
            insertions=tuple(data["insertions"]),
            max_insertions=int(data["max_insertions"]),
        )

    def save(self, stream: TextIO) -> None:
        json.dump(self.to_json(), stream, ensure_ascii=False, sort_keys=True)

    @classmethod
    def load(cls, stream: TextIO) -> "TransducerModel":
        try:
            data = json.load(stream)
        except json.JSONDecodeError as exc:
            raise ValueError(f"corrupt transducer model: {exc}") from None
        return cls.from_json(data)


# -- derivations ---------------------------------------------------------------

class Hyp(NamedTuple):
    score: float
    pos: int
    out: str
    run: int  # consecutive insertions just made
    actions: tuple
    done: bool


def action_features(word: str, pos: int, out: str, action: Action) -> list:
    a = "A=" + action.key()
    prev = out[-1] if out else BOW
    prev2 = out[-2:] if len(out) >= 2 else BOW + out
    cur = word[pos] if pos < len(word) else EOW
    left = word[pos - 1] if pos > 0 else BOW
    right = word[pos + 1] if pos + 1 < len(word) else EOW
    return [
        a,
        f"{a}|c={cur}",
        f"{a}|l={left}",
        f"{a}|r={right}",
        f"{a}|lc={left}{cur}",
        f"{a}|cr={cur}{right}",
        f"{a}|lcr={left}{cur}{right}",
        f"{a}|p={prev}",
        f"{a}|pp={prev2}",
        f"op={action.op}|c={cur}|p={prev}",
    ]


def legal_actions(model: TransducerModel, word: str, pos: int, run: int) -> list:
    actions = []
    if run < model.max_insertions:
        actions.extend(Action(INS, "", t) for t in model.insertions)
    if pos < len(word):
        ch = word[pos]
        targets = model.substitutions.get(ch)
        if targets is None and ch not in model.deletable:
            targets = [ch]
        actions.extend(Action(SUB, ch, t) for t in targets or ())
        if ch in model.deletable:
            actions.append(Action(DEL, ch, ""))
    else:
        actions.append(END_ACTION)
    return actions


def extend(model: TransducerModel, word: str, h: Hyp, action: Action) -> Hyp:
    s = h.score + model.score(action_features(word, h.pos, h.out, action))
    if action.op == INS:
        return Hyp(s, h.pos, h.out + action.tgt, h.run + 1, h.actions + (action,), False)
    if action.op == END:
        return Hyp(s, h.pos, h.out, 0, h.actions + (action,), True)
    return Hyp(s, h.pos + 1, h.out + action.tgt, 0, h.actions + (action,), False)


def _rank(h: Hyp):
    return (-h.score, h.out, h.actions)


def _start() -> Hyp:
    return Hyp(0.0, 0, "", 0, (), False)


def beam_search(model: TransducerModel, word: str, b: int) -> list:
    """All finished hypotheses kept by a step-synchronous beam of width ``b``."""
    if b < 1:
        raise ValueError("beam width must be at least 1")
    active = [_start()]
    finished = []
    while active:
        pool = {}
        for h in active:
            for action in legal_actions(model, word, h.pos, h.run):
                new = extend(model, word, h, action)
                # derivations reaching the same state share every continuation
                key = (new.pos, new.out, new.run, new.done)
                old = pool.get(key)
                if old is None or _rank(new) < _rank(old):
                    pool[key] = new
        kept = sorted(pool.values(), key=_rank)[:b]
        finished.extend(h for h in kept if h.done)
        active = [h for h in kept if not h.done]
    return finished


def kbest_transduce(model: TransducerModel, word: str, b: int = BEAM_WIDTH) -> list:
    """Up to ``b`` distinct (candidate, score) pairs, best first; ties by candidate string."""
    best = {}
    for h in beam_search(model, word, b):
        if h.out not in best or h.score > best[h.out]:
            best[h.out] = h.score
    ranked = sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:b]


def greedy_transduce(model: TransducerModel, word: str) -> tuple:
    """Take the single best next action until END."""
    h = _start()
    while not h.done:
        h = min((extend(model, word, h, a) for a in legal_actions(model, word, h.pos, h.run)),
                key=_rank)
    return h.out, h.score


def enumerate_derivations(model: TransducerModel, word: str) -> list:
    """Every complete derivation (exhaustive; for small words only)."""
    out = []
    stack = [_start()]
    while stack:
        h = stack.pop()
        if h.done:
            out.append(h)
            continue
        stack.extend(extend(model, word, h, a) for a in legal_actions(model, word, h.pos, h.run))
    return out


# -- training -----------------------------------------------------------------

def edits_to_actions(edits: Sequence[Edit]) -> tuple:
    return tuple(Action(e.op, e.src, e.tgt) for e in edits) + (END_ACTION,)


def derivation_features(word: str, actions: Sequence[Action]) -> list:
    feats = []
    pos, out = 0, ""
    for a in actions:
        feats.extend(action_features(word, pos, out, a))
        if a.op in (SUB, DEL):
            pos += 1
        out += a.tgt
    return feats


def _max_run(actions: Sequence[Action]) -> int:
    best = run = 0
    for a in actions:
        run = run + 1 if a.op == INS else 0
        best = max(best, run)
    return best


def build_candidates(alignments: Sequence[Sequence[Edit]], max_insertions: int) -> TransducerModel:
    subs: dict = {}
    dels, ins = set(), set()
    for edits in alignments:
        for e in edits:
            if e.op == SUB:
                subs.setdefault(e.src, set()).add(e.tgt)
            elif e.op == DEL:
                dels.add(e.src)
            else:
                ins.add(e.tgt)
    return TransducerModel(
        substitutions={k: sorted(v) for k, v in sorted(subs.items())},
        deletable=frozenset(dels), insertions=tuple(sorted(ins)),
        max_insertions=max_insertions)


def train_transducer(pairs: Sequence[tuple], epochs: int = 5, seed: int = 0,
                     beam: int = BEAM_WIDTH, max_insertions: int = MAX_INSERTIONS,
                     alignments: Optional[Sequence[Sequence[Edit]]] = None) -> TransducerModel:
    """Averaged perceptron over (source, target) pairs.

    An update is made whenever the beam's best output string differs from the
    gold target.
    """
    if alignments is None:
        alignments = refine_alignments(pairs)
    model = build_candidates(alignments, max_insertions)
    data = []
    for (src, tgt), edits in zip(pairs, alignments):
        actions = edits_to_actions(edits)
        if _max_run(actions) > max_insertions:
            continue
        data.append((src, tgt, actions))
    if len(data) < len(pairs):
        log.info("skipped %d pairs needing more than %d consecutive insertions",
                 len(pairs) - len(data), max_insertions)
    w = model.weights
    totals: dict = {}
    clock = 1
    rng = random.Random(seed)
    for epoch in range(epochs):
        order = list(range(len(data)))
        rng.shuffle(order)
        errors = 0
        for k in order:
            src, tgt, gold = data[k]
            pred = min(beam_search(model, src, beam), key=_rank)
            if pred.out != tgt:
                errors += 1
                for f in derivation_features(src, gold):
                    w[f] = w.get(f, 0.0) + 1.0
                    totals[f] = totals.get(f, 0.0) + clock
                for f in derivation_features(src, pred.actions):
                    w[f] = w.get(f, 0.0) - 1.0
                    totals[f] = totals.get(f, 0.0) - clock
            clock += 1
        log.info("transducer epoch %d: %d/%d errors", epoch + 1, errors, len(data))
    if epochs:
        averaged = {f: v - totals.get(f, 0.0) / clock for f, v in w.items()}
        model.weights = {f: v for f, v in averaged.items() if v != 0.0}
    else:
        model.weights = {}
    return model
