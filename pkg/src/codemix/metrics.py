"""Attachment scores, per-label precision/recall/F1 and POS accuracy."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .conllu import MIXED_LANGS, Sentence


class AlignmentError(ValueError):
    """Gold and predicted data do not line up."""


def check_aligned(gold: Sequence[Sentence], pred: Sequence[Sentence]) -> None:
    if len(gold) != len(pred):
        raise AlignmentError(f"{len(gold)} gold sentences but {len(pred)} predicted")
    for k, (g, p) in enumerate(zip(gold, pred), start=1):
        if len(g) != len(p):
            raise AlignmentError(
                f"sentence {g.sent_id or k}: {len(g)} gold tokens but {len(p)} predicted")


def attachment_scores(gold: Sequence[Sentence], pred: Sequence[Sentence],
                      ignore_punct: bool = False) -> tuple:
    """(UAS, LAS) as percentages over all scored tokens."""
    check_aligned(gold, pred)
    total = heads = labeled = 0
    for g, p in zip(gold, pred):
        for gt, pt in zip(g.tokens, p.tokens):
            if ignore_punct and gt.upos == "PUNCT":
                continue
            total += 1
            if gt.head == pt.head:
                heads += 1
                if gt.deprel == pt.deprel:
                    labeled += 1
    if total == 0:
        raise AlignmentError("no tokens to score")
    return 100.0 * heads / total, 100.0 * labeled / total


@dataclass(frozen=True)
class LabelScore:
    precision: float
    recall: float
    f1: float
    count: int


def label_prf(gold: Sequence[str], pred: Sequence[str],
              labels: Optional[Iterable[str]] = None) -> tuple:
    """Per-label scores (labels absent from both sides omitted) and overall accuracy.

    ``count`` is the gold support of the label.
    """
    if len(gold) != len(pred):
        raise AlignmentError(f"{len(gold)} gold tags but {len(pred)} predicted")
    if labels is None:
        labels = sorted(set(gold) | set(pred))
    report = {}
    for label in labels:
        tp = sum(1 for g, p in zip(gold, pred) if g == label and p == label)
        n_pred = sum(1 for p in pred if p == label)
        n_gold = sum(1 for g in gold if g == label)
        if n_pred == 0 and n_gold == 0:
            continue
        precision = tp / n_pred if n_pred else 0.0
        recall = tp / n_gold if n_gold else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        report[label] = LabelScore(precision, recall, f1, n_gold)
    accuracy = sum(1 for g, p in zip(gold, pred) if g == p) / len(gold) if gold else 0.0
    return report, accuracy


def pos_accuracy(gold: Sequence[Sentence], pred: Sequence[Sentence],
                 all_tokens: bool = False) -> dict:
    """Accuracy per gold language ("hi", "en") and "total" (micro, hi+en unless ``all_tokens``)."""
    check_aligned(gold, pred)
    correct: dict = {}
    count: dict = {}
    for g, p in zip(gold, pred):
        for gt, pt in zip(g.tokens, p.tokens):
            lang = gt.lang
            groups = []
            if lang in MIXED_LANGS:
                groups.append(lang)
            if lang in MIXED_LANGS or all_tokens:
                groups.append("total")
            for key in groups:
                count[key] = count.get(key, 0) + 1
                correct[key] = correct.get(key, 0) + (gt.upos == pt.upos)
    return {key: correct[key] / count[key] for key in count}


def flatten_langs(corpus: Iterable[Sentence]) -> list:
    return [t.lang or "" for s in corpus for t in s.tokens]
