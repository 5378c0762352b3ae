"""Interpolated modified Kneser-Ney trigram language model with ARPA import/export."""
from __future__ import annotations

import io
import math
from collections import Counter, defaultdict
from typing import Iterable, Optional, Sequence, TextIO

BOS, EOS, UNK = "<s>", "</s>", "<unk>"
ORDER = 3
_DEFAULT_DISCOUNTS = (0.5, 1.0, 1.5)


def _discounts(counts: Iterable[int]) -> tuple:
    """Modified KN discounts (D1, D2, D3+) from count-of-counts.

    Falls back to fixed values when a count-of-count needed by the estimate
    is zero (typical on tiny corpora).
    """
    coc = Counter(c for c in counts if c <= 4)
    n1, n2, n3, n4 = (coc[k] for k in (1, 2, 3, 4))
    if min(n1, n2, n3, n4) == 0:
        return _DEFAULT_DISCOUNTS
    y = n1 / (n1 + 2 * n2)
    ds = (1 - 2 * y * n2 / n1, 2 - 3 * y * n3 / n2, 3 - 4 * y * n4 / n3)
    # keep 0 < D_k <= k so every discounted count stays nonnegative
    return tuple(min(max(d, 1e-3), k) for k, d in zip((1, 2, 3), ds))


def _disc(c: float, ds: tuple) -> float:
    if c <= 0:
        return 0.0
    return ds[min(int(c), 3) - 1]


class _Level:
    """Counts for one order: per-context totals and discount mass."""

    def __init__(self, counts: dict, ds: tuple):
        self.counts = counts  # ngram tuple -> (adjusted) count
        self.ds = ds
        self.totals = defaultdict(float)
        self.mass = defaultdict(float)  # sum of discounts taken in a context
        for ngram, c in counts.items():
            ctx = ngram[:-1]
            self.totals[ctx] += c
            self.mass[ctx] += _disc(c, ds)

    def gamma(self, ctx: tuple) -> float:
        total = self.totals.get(ctx, 0.0)
        return self.mass[ctx] / total if total else 1.0


class TrigramLM:
    def __init__(self, vocab: Sequence[str], levels: Sequence[_Level]):
        self.vocab = list(vocab)  # predictable words: everything but <s>
        self.vocab_set = set(vocab) | {BOS}
        self.levels = list(levels)  # index 0: unigrams

    def _map(self, word: str) -> str:
        return word if word in self.vocab_set else UNK

    def prob(self, word: str, history: Sequence[str] = ()) -> float:
        """p(word | history); the history is truncated to the last two words."""
        word = self._map(word)
        hist = tuple(self._map(h) for h in history)[-(ORDER - 1):]
        return self._prob(word, hist)

    def _prob(self, word: str, hist: tuple) -> float:
        if not hist:
            level = self.levels[0]
            uniform = 1.0 / len(self.vocab)
            c = level.counts.get((word,), 0.0)
            total = level.totals.get((), 0.0)
            if not total:
                return uniform
            return (c - _disc(c, level.ds)) / total + level.gamma(()) * uniform
        level = self.levels[len(hist)]
        lower = self._prob(word, hist[1:])
        total = level.totals.get(hist, 0.0)
        if not total:
            return lower
        c = level.counts.get(hist + (word,), 0.0)
        return (c - _disc(c, level.ds)) / total + level.gamma(hist) * lower

    def logprob(self, word: str, history: Sequence[str] = ()) -> float:
        return math.log(self.prob(word, history))

    def sentence_logprob(self, words: Sequence[str], eos: bool = True) -> float:
        hist = [BOS]
        total = 0.0
        for w in list(words) + ([EOS] if eos else []):
            total += self.logprob(w, hist)
            hist.append(w)
        return total

    # -- ARPA ------------------------------------------------------------------
    def ngrams(self, order: int) -> list:
        if order == 1:
            return [(w,) for w in [BOS] + self.vocab]
        return sorted(self.levels[order - 1].counts)

    def write_arpa(self, stream: TextIO) -> None:
        """Backoff-form export: interpolated probabilities of seen n-grams plus
        context weights, which reproduces the interpolated model exactly."""
        grams = {k: self.ngrams(k) for k in range(1, ORDER + 1)}
        stream.write("\n\\data\\\n")
        for k in range(1, ORDER + 1):
            stream.write(f"ngram {k}={len(grams[k])}\n")
        for k in range(1, ORDER + 1):
            stream.write(f"\n\\{k}-grams:\n")
            for g in grams[k]:
                if g == (BOS,):
                    lp = -99.0
                else:
                    lp = math.log10(self._prob(g[-1], g[:-1]))
                line = f"{lp:.12g}\t{' '.join(g)}"
                if k < ORDER and g[-1] != EOS:
                    bow = self.levels[k].gamma(g) if self.levels[k].totals.get(g) else 1.0
                    line += f"\t{math.log10(bow):.12g}"
                stream.write(line + "\n")
        stream.write("\n\\end\\\n")


def train_lm(corpus: Iterable[Sequence[str]]) -> TrigramLM:
    """Interpolated modified Kneser-Ney over orders 1-3.

    Lower orders use continuation counts, except n-grams starting with <s>,
    which keep raw counts because nothing can precede them.
    """
    raw = [Counter() for _ in range(ORDER)]
    vocab = set()
    n_sent = 0
    for sent in corpus:
        words = [BOS] + list(sent) + [EOS]
        if len(words) == 2:
            continue
        n_sent += 1
        vocab.update(sent)
        for k in range(1, ORDER + 1):
            for i in range(max(1, k - 1), len(words)):
                if i - k + 1 < 0:
                    continue
                raw[k - 1][tuple(words[i - k + 1:i + 1])] += 1
    if not n_sent:
        raise ValueError("cannot train a language model on an empty corpus")
    adjusted = [None] * ORDER
    adjusted[ORDER - 1] = dict(raw[ORDER - 1])
    for k in range(ORDER - 1, 0, -1):
        cont = Counter()
        for g in raw[k]:
            cont[g[1:]] += 1
        level = {}
        for g, c in raw[k - 1].items():
            level[g] = c if g[0] == BOS else cont.get(g, 0)
        adjusted[k - 1] = {g: c for g, c in level.items() if c > 0}
    levels = [_Level(adjusted[k], _discounts(adjusted[k].values())) for k in range(ORDER)]
    predictable = sorted(vocab - {BOS, EOS, UNK}) + [EOS, UNK]
    return TrigramLM(predictable, levels)


class ArpaLM:
    """Backoff n-gram model read from an ARPA file."""

    def __init__(self, probs: dict, backoffs: dict, order: int):
        self.probs = probs  # ngram tuple -> log10 p
        self.backoffs = backoffs  # context tuple -> log10 bow
        self.order = order
        self.vocab = sorted({g[0] for g in probs if len(g) == 1} - {BOS})
        self.vocab_set = set(self.vocab) | {BOS}

    def _map(self, word: str) -> str:
        return word if word in self.vocab_set else UNK

    def _log10(self, word: str, hist: tuple) -> float:
        g = hist + (word,)
        if g in self.probs:
            return self.probs[g]
        if not hist:
            return self.probs.get((UNK,), -99.0)
        return self.backoffs.get(hist, 0.0) + self._log10(word, hist[1:])

    def prob(self, word: str, history: Sequence[str] = ()) -> float:
        word = self._map(word)
        hist = tuple(self._map(h) for h in history)[-(self.order - 1):]
        return 10.0 ** self._log10(word, hist)

    def logprob(self, word: str, history: Sequence[str] = ()) -> float:
        return math.log(self.prob(word, history))

    sentence_logprob = TrigramLM.sentence_logprob


def read_arpa(stream: TextIO | str) -> ArpaLM:
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    probs, backoffs = {}, {}
    order = 0
    section = None
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        if line == "\\data\\":
            section = "data"
            continue
        if line == "\\end\\":
            break
        if line.startswith("\\") and line.endswith("-grams:"):
            section = int(line[1:line.index("-")])
            order = max(order, section)
            continue
        if section == "data" or section is None:
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        try:
            lp = float(parts[0])
            if "\t" in line:
                gram = tuple(parts[1].split())
                bow = float(parts[2]) if len(parts) > 2 else None
            else:
                gram = tuple(parts[1:1 + section])
                bow = float(parts[1 + section]) if len(parts) > 1 + section else None
        except (ValueError, IndexError):
            raise ValueError(f"line {lineno}: malformed ARPA entry") from None
        if len(gram) != section:
            raise ValueError(f"line {lineno}: expected a {section}-gram")
        probs[gram] = lp
        if bow is not None:
            backoffs[gram] = bow
    if not probs:
        raise ValueError("no n-grams found in ARPA input")
    return ArpaLM(probs, backoffs, order)
