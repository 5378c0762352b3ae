"""Word vectors: loading, seeded random initialization, lexicon projection."""
from __future__ import annotations

import io
from collections import defaultdict
from typing import Mapping, Optional, TextIO

import numpy as np

# Input-layer widths per feature family.
WORD_DIM = 80
POS_DIM = 20
LANG_DIM = 2
AFFIX_DIM = 20
LABEL_DIM = 20

INIT_RANGE = 0.25
UNK = "<unk>"

_LANG_VECTORS = {
    "hi": (-0.25, 0.25),
    "en": (0.25, -0.25),
}


def random_embedding(seed: int, dimension: int) -> np.ndarray:
    """Vector with coordinates uniform in [-0.25, 0.25], fixed by ``seed``."""
    if dimension < 1:
        raise ValueError(f"embedding dimension must be positive, got {dimension}")
    rng = np.random.default_rng(seed)
    return rng.uniform(-INIT_RANGE, INIT_RANGE, size=dimension)


def language_tag_vector(lang: str) -> np.ndarray:
    try:
        return np.array(_LANG_VECTORS[lang], dtype=np.float64)
    except KeyError:
        raise ValueError(
            f"language tag {lang!r} has no vector; resolve it to hi/en through its fragment"
        ) from None


class EmbeddingTable:
    """Immutable word -> vector map; unknown words get ``oov_vector``."""

    def __init__(self, entries: Mapping[str, np.ndarray], dimension: int,
                 oov_vector: Optional[np.ndarray] = None, seed: int = 0):
        self.dimension = dimension
        self.entries = {w: np.asarray(v, dtype=np.float64) for w, v in entries.items()}
        for word, vec in self.entries.items():
            if vec.shape != (dimension,):
                raise ValueError(f"vector for {word!r} has length {vec.shape[0]}, expected {dimension}")
        if oov_vector is None:
            oov_vector = random_embedding(seed, dimension)
        self.oov_vector = np.asarray(oov_vector, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __getitem__(self, word: str) -> np.ndarray:
        return self.entries.get(word, self.oov_vector)

    def words(self) -> list:
        return list(self.entries)


def load_embeddings(stream: TextIO | str, expected_dim: Optional[int] = None,
                    seed: int = 0) -> EmbeddingTable:
    """Read word2vec-style text vectors, with or without a "count dim" header."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    entries = {}
    dim = expected_dim
    for lineno, line in enumerate(stream, start=1):
        parts = line.rstrip("\n").split()
        if not parts:
            continue
        if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
            header_dim = int(parts[1])
            if dim is not None and header_dim != dim:
                raise ValueError(f"line 1: header declares dimension {header_dim}, expected {dim}")
            dim = header_dim
            continue
        word, values = parts[0], parts[1:]
        if dim is None:
            dim = len(values)
        if len(values) != dim:
            raise ValueError(f"line {lineno}: expected {dim} values for {word!r}, found {len(values)}")
        try:
            entries[word] = np.array([float(v) for v in values])
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric value in vector for {word!r}") from None
    if dim is None:
        raise ValueError("no embeddings found")
    return EmbeddingTable(entries, dim, seed=seed)


def load_lexicon(stream: TextIO | str) -> dict:
    """Two-column TSV (source, target); repeated sources give multiple translations."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    pairs = defaultdict(list)
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 2 or not cols[0] or not cols[1]:
            raise ValueError(f"line {lineno}: expected 'source<TAB>target'")
        if cols[1] not in pairs[cols[0]]:
            pairs[cols[0]].append(cols[1])
    return dict(pairs)


def project_lexicon(source: EmbeddingTable, lexicon: Mapping[str, list]) -> EmbeddingTable:
    """Give each lexicon word the mean vector of its in-vocabulary translations."""
    projected = {}
    for word, translations in lexicon.items():
        vecs = [source.entries[t] for t in translations if t in source.entries]
        if vecs:
            projected[word] = np.mean(vecs, axis=0)
    if not projected:
        raise ValueError("projection is empty: no lexicon translation is in the source vocabulary")
    return EmbeddingTable(projected, source.dimension, oov_vector=source.oov_vector)


def merge_tables(primary: EmbeddingTable, extra: EmbeddingTable) -> EmbeddingTable:
    """Union of two tables of one dimension; ``primary`` wins on overlap."""
    if primary.dimension != extra.dimension:
        raise ValueError(f"dimension mismatch: {primary.dimension} vs {extra.dimension}")
    entries = dict(extra.entries)
    entries.update(primary.entries)
    return EmbeddingTable(entries, primary.dimension, oov_vector=primary.oov_vector)
