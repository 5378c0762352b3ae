"""Arc-eager transition system, static oracle, features and greedy decoding.

A configuration is terminal once the buffer is empty; any stack nodes still
lacking a head at that point are attached by ``finalize``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .conllu import Sentence
from .network import NULL, ROOT, FeedForwardModel, Table, language_table, make_table
from .embeddings import LABEL_DIM, POS_DIM, WORD_DIM, EmbeddingTable

log = logging.getLogger(__name__)

SHIFT, LEFT, RIGHT, REDUCE = "SHIFT", "LEFT", "RIGHT", "REDUCE"
KINDS = (SHIFT, LEFT, RIGHT, REDUCE)

ROOT_LABEL = "root"
FALLBACK_LABEL = "dep"


@dataclass(frozen=True)
class Transition:
    kind: str
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown transition kind {self.kind!r}")

    def __str__(self) -> str:
        return f"{self.kind}:{self.label}" if self.kind in (LEFT, RIGHT) else self.kind

    @classmethod
    def parse(cls, text: str) -> "Transition":
        kind, _, label = text.partition(":")
        return cls(kind, label)


class IllegalTransition(ValueError):
    pass


class NonProjectiveError(ValueError):
    def __init__(self, arc1, arc2, sent_id=""):
        self.arcs = (arc1, arc2)
        super().__init__(
            f"sentence {sent_id or '?'} is non-projective: arc {arc1[0]}->{arc1[1]} "
            f"crosses arc {arc2[0]}->{arc2[1]}")


class Configuration:
    """Arc-eager state over nodes 0..n (0 is ROOT)."""

    __slots__ = ("n", "stack", "buffer", "heads", "labels", "children")

    def __init__(self, n: int):
        self.n = n
        self.stack = [0]
        self.buffer = list(range(1, n + 1))
        self.heads = [None] * (n + 1)
        self.labels = [""] * (n + 1)
        self.children = [[] for _ in range(n + 1)]

    @classmethod
    def initial(cls, n: int) -> "Configuration":
        return cls(n)

    def copy(self) -> "Configuration":
        c = Configuration.__new__(Configuration)
        c.n = self.n
        c.stack = list(self.stack)
        c.buffer = list(self.buffer)
        c.heads = list(self.heads)
        c.labels = list(self.labels)
        c.children = [list(ch) for ch in self.children]
        return c

    @property
    def arcs(self) -> set:
        return {(h, d, self.labels[d]) for d, h in enumerate(self.heads) if h is not None}

    def is_terminal(self) -> bool:
        return not self.buffer

    def has_head(self, node: int) -> bool:
        return self.heads[node] is not None

    def add_arc(self, head: int, dep: int, label: str) -> None:
        self.heads[dep] = head
        self.labels[dep] = label
        self.children[head].append(dep)

    def leftmost_child(self, node: Optional[int]) -> Optional[int]:
        if node is None:
            return None
        left = [c for c in self.children[node] if c < node]
        return min(left) if left else None

    def rightmost_child(self, node: Optional[int]) -> Optional[int]:
        if node is None:
            return None
        right = [c for c in self.children[node] if c > node]
        return max(right) if right else None

    def summary(self) -> str:
        return f"stack={self.stack} buffer={self.buffer[:4]}{'...' if len(self.buffer) > 4 else ''}"


def legal_transitions(c: Configuration) -> set:
    if not c.buffer:
        return set()
    s0 = c.stack[-1]
    legal = {SHIFT, RIGHT}
    if s0 != 0 and not c.has_head(s0):
        legal.add(LEFT)
    if c.has_head(s0):
        legal.add(REDUCE)
    return legal


def apply_transition(c: Configuration, t: Transition) -> Configuration:
    """Return the successor configuration; ``c`` is left untouched."""
    new = c.copy()
    apply_in_place(new, t)
    return new


def apply_in_place(c: Configuration, t: Transition) -> None:
    if t.kind not in legal_transitions(c):
        raise IllegalTransition(f"{t} is not legal in configuration {c.summary()}")
    if t.kind == SHIFT:
        c.stack.append(c.buffer.pop(0))
    elif t.kind == LEFT:
        c.add_arc(c.buffer[0], c.stack.pop(), t.label)
    elif t.kind == RIGHT:
        b0 = c.buffer.pop(0)
        c.add_arc(c.stack[-1], b0, t.label)
        c.stack.append(b0)
    else:
        c.stack.pop()


# -- oracle ------------------------------------------------------------------

def check_projective(heads: Sequence[int], sent_id: str = "") -> None:
    """Raise NonProjectiveError naming a crossing arc pair, if there is one.

    ``heads[i]`` is the head of token i+1; ROOT arcs are included.
    """
    arcs = [(h, d) for d, h in enumerate(heads, start=1)]
    spans = [(min(h, d), max(h, d), (h, d)) for h, d in arcs]
    for i, (l1, r1, a1) in enumerate(spans):
        for l2, r2, a2 in spans[i + 1:]:
            if l1 < l2 < r1 < r2 or l2 < l1 < r2 < r1:
                raise NonProjectiveError(a1, a2, sent_id)


def is_projective(heads: Sequence[int]) -> bool:
    try:
        check_projective(heads)
    except NonProjectiveError:
        return False
    return True


def oracle_sequence(gold: Sentence) -> list:
    """Static arc-eager oracle: the transitions that rebuild the gold tree."""
    heads = [t.head for t in gold.tokens]
    if any(h is None for h in heads):
        raise ValueError(f"sentence {gold.sent_id or '?'} has tokens without heads")
    check_projective(heads, gold.sent_id)
    gold_head = [None] + heads
    gold_label = [""] + [t.deprel for t in gold.tokens]
    c = Configuration(len(gold))
    seq = []
    while not c.is_terminal():
        s0, b0 = c.stack[-1], c.buffer[0]
        if s0 != 0 and gold_head[s0] == b0:
            t = Transition(LEFT, gold_label[s0])
        elif gold_head[b0] == s0:
            t = Transition(RIGHT, gold_label[b0])
        elif c.has_head(s0) and any(
                gold_head[b0] == k or gold_head[k] == b0 for k in c.stack[:-1]):
            t = Transition(REDUCE)
        else:
            t = Transition(SHIFT)
        apply_in_place(c, t)
        seq.append(t)
    return seq


def replay(n: int, transitions: Iterable[Transition]) -> Configuration:
    c = Configuration(n)
    for t in transitions:
        apply_in_place(c, t)
    return c


# -- features ----------------------------------------------------------------

STACK_NODES = ("s0", "s1", "s2", "s3")
BUFFER_NODES = ("b0", "b1", "b2", "b3")
CHILD_NODES = ("lc_s0", "rc_s0", "lc_s1", "rc_s1", "lc_b0")
FEATURE_NODES = STACK_NODES + BUFFER_NODES + CHILD_NODES


def feature_nodes(c: Configuration) -> dict:
    """The 13 positional nodes; None where the position is empty."""
    nodes = {}
    for i, name in enumerate(STACK_NODES):
        nodes[name] = c.stack[-1 - i] if i < len(c.stack) else None
    for i, name in enumerate(BUFFER_NODES):
        nodes[name] = c.buffer[i] if i < len(c.buffer) else None
    nodes["lc_s0"] = c.leftmost_child(nodes["s0"])
    nodes["rc_s0"] = c.rightmost_child(nodes["s0"])
    nodes["lc_s1"] = c.leftmost_child(nodes["s1"])
    nodes["rc_s1"] = c.rightmost_child(nodes["s1"])
    nodes["lc_b0"] = c.leftmost_child(nodes["b0"])
    return nodes


def word_key(form: str) -> str:
    return form.lower()


def extract_parse_features(c: Configuration, sentence: Sentence,
                           langs: Optional[Sequence[str]] = None) -> dict:
    """Word, POS and language of each feature node, plus labels of child nodes.

    ``langs`` gives the resolved (hi/en) language per token; without it the
    token's own tag is used.
    """
    feats = {}
    for name, node in feature_nodes(c).items():
        if node is None:
            w = p = l = NULL
        elif node == 0:
            w = p = l = ROOT
        else:
            tok = sentence.tokens[node - 1]
            w = word_key(tok.norm)
            p = tok.upos or NULL
            l = (langs[node - 1] if langs is not None else tok.lang) or NULL
        feats[f"{name}.w"] = w
        feats[f"{name}.p"] = p
        feats[f"{name}.l"] = l
        if name in CHILD_NODES:
            feats[f"{name}.d"] = NULL if node is None else c.labels[node]
    return feats


def parser_slots(use_lang: bool) -> list:
    slots = []
    for name in FEATURE_NODES:
        slots.append((f"{name}.w", "word"))
        slots.append((f"{name}.p", "pos"))
        if use_lang:
            slots.append((f"{name}.l", "lang"))
    slots.extend((f"{name}.d", "deprel") for name in CHILD_NODES)
    return slots


def transition_labels(deprels: Iterable[str]) -> list:
    """Fixed class order: SHIFT, REDUCE, then LEFT/RIGHT per sorted relation."""
    rels = sorted(set(deprels))
    return [SHIFT, REDUCE] + [f"{LEFT}:{r}" for r in rels] + [f"{RIGHT}:{r}" for r in rels]


def build_parser_model(treebank: Sequence[Sentence], use_lang: bool = False,
                       extra_deprels: Iterable[str] = (), hidden_size: int = 200,
                       seed: int = 0, word_vectors: Optional[EmbeddingTable] = None,
                       word_dim: int = WORD_DIM, pos_dim: int = POS_DIM,
                       label_dim: int = LABEL_DIM) -> FeedForwardModel:
    deprels = {t.deprel for s in treebank for t in s.tokens if t.deprel} | set(extra_deprels)
    words = {word_key(t.norm) for s in treebank for t in s.tokens}
    if word_vectors is not None:
        words |= set(word_vectors.entries)
    tables = {
        "word": make_table("word", words, word_dim, seed + 1, word_vectors),
        "pos": make_table("pos", {t.upos for s in treebank for t in s.tokens if t.upos}, pos_dim, seed + 2),
        "deprel": make_table("deprel", deprels, label_dim, seed + 3),
    }
    if use_lang:
        tables["lang"] = language_table()
    meta = {"kind": "parser", "use_lang": use_lang}
    return FeedForwardModel(tables, parser_slots(use_lang), transition_labels(deprels),
                            hidden_size=hidden_size, seed=seed, meta=meta)


def training_examples(treebank: Iterable[Sentence], langs_for=None) -> list:
    """(features, transition label) pairs from the oracle; non-projective trees are skipped."""
    examples = []
    skipped = 0
    for sent in treebank:
        try:
            seq = oracle_sequence(sent)
        except ValueError:
            skipped += 1
            continue
        langs = langs_for(sent) if langs_for is not None else None
        c = Configuration(len(sent))
        for t in seq:
            examples.append((extract_parse_features(c, sent, langs), str(t)))
            apply_in_place(c, t)
    if skipped:
        log.info("skipped %d sentences without a projective gold tree", skipped)
    return examples


# -- decoding ----------------------------------------------------------------

Scorer = Callable[[Configuration], np.ndarray]


def model_scorer(model: FeedForwardModel, sentence: Sentence,
                 langs: Optional[Sequence[str]] = None) -> Scorer:
    def score(c: Configuration) -> np.ndarray:
        return model.forward(extract_parse_features(c, sentence, langs))
    return score


def best_legal(labels: Sequence[str], scores: np.ndarray, c: Configuration) -> Transition:
    """Highest-scoring legal transition; ties go to the earlier class."""
    legal = legal_transitions(c)
    root_taken = bool(c.children[0])
    best, best_score = None, -np.inf
    for i, label in enumerate(labels):
        t = Transition.parse(label)
        if t.kind not in legal:
            continue
        if t.kind == RIGHT and c.stack[-1] == 0 and root_taken:
            continue
        if scores[i] > best_score:
            best, best_score = t, scores[i]
    if best is None:
        # only reachable when every legal class was masked; shifting is always legal here
        best = Transition(SHIFT)
    return best


def finalize(c: Configuration) -> None:
    """Attach nodes left without a head: the first to ROOT if ROOT is free, the rest to the tree root."""
    for node in range(1, c.n + 1):
        if c.heads[node] is not None:
            continue
        if not c.children[0]:
            c.add_arc(0, node, ROOT_LABEL)
        else:
            c.add_arc(c.children[0][0], node, FALLBACK_LABEL)


def parse_with_scorer(sentence: Sentence, labels: Sequence[str], scorer: Scorer) -> Sentence:
    c = Configuration(len(sentence))
    while not c.is_terminal():
        apply_in_place(c, best_legal(labels, scorer(c), c))
    finalize(c)
    return apply_arcs(sentence, c)


def apply_arcs(sentence: Sentence, c: Configuration) -> Sentence:
    out = sentence.copy()
    for tok in out.tokens:
        tok.head = c.heads[tok.index]
        tok.deprel = c.labels[tok.index]
    return out


def greedy_parse(model: FeedForwardModel, sentence: Sentence,
                 langs: Optional[Sequence[str]] = None) -> Sentence:
    return parse_with_scorer(sentence, model.labels, model_scorer(model, sentence, langs))
