"""Synthetic noisy spellings: non-initial vowel dropping and consonant confusion."""
from __future__ import annotations

import io
import random
from importlib import resources
from typing import Iterable, Mapping, Optional, TextIO

VOWELS = frozenset("aeiou")
P_DROP = 0.5
P_SUB = 0.1


def load_confusions(stream: Optional[TextIO | str] = None) -> dict:
    """Two-column TSV of phonologically close spellings, read in both directions."""
    if stream is None:
        stream = resources.files("codemix").joinpath("data/confusions.tsv").read_text(encoding="utf-8")
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    table: dict = {}
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ValueError(f"line {lineno}: expected two tab-separated columns")
        a, b = cols
        table.setdefault(a, []).append(b)
        table.setdefault(b, []).append(a)
    return {k: sorted(set(v)) for k, v in table.items()}


def corrupt(word: str, rng: random.Random, confusions: Mapping[str, list],
            p_drop: float = P_DROP, p_sub: float = P_SUB) -> str:
    keys = sorted(confusions, key=len, reverse=True)
    out = []
    i = 0
    while i < len(word):
        ch = word[i]
        if ch in VOWELS:
            if i > 0 and rng.random() < p_drop:
                i += 1
                continue
            out.append(ch)
            i += 1
            continue
        unit = next((k for k in keys if word.startswith(k, i)), None)
        if unit is not None and rng.random() < p_sub:
            out.append(rng.choice(confusions[unit]))
            i += len(unit)
        else:
            out.append(ch)
            i += 1
    return "".join(out) or word[:1]


def generate_noisy_pairs(clean_words: Iterable[str], seed: int = 0, p_drop: float = P_DROP,
                         p_sub: float = P_SUB, variants: int = 3,
                         confusions: Optional[Mapping[str, list]] = None) -> list:
    """(noisy, clean) pairs, ``variants`` draws per word with duplicates removed."""
    if confusions is None:
        confusions = load_confusions()
    rng = random.Random(seed)
    pairs = []
    for word in clean_words:
        seen = set()
        for _ in range(variants):
            noisy = corrupt(word, rng, confusions, p_drop, p_sub)
            if noisy not in seen:
                seen.add(noisy)
                pairs.append((noisy, word))
    return pairs
