"""Single-hidden-layer feed-forward classifier shared by the LID, POS and parser heads.

Inputs are symbolic: each input slot names an embedding table, and a feature
value is looked up in that table (unknown values map to ``<unk>``).  The
slot embeddings are concatenated, passed through one ReLU layer and a softmax
output layer.  Training minimizes cross entropy plus an l2 penalty with
mini-batch Adagrad and inverted dropout on the hidden layer.
"""
from __future__ import annotations

import json
import logging
import math
import struct
from dataclasses import dataclass, field
from typing import BinaryIO, Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .embeddings import INIT_RANGE, EmbeddingTable, language_tag_vector, random_embedding

log = logging.getLogger(__name__)

UNK, NULL, ROOT = "<unk>", "<null>", "<root>"
SPECIALS = (UNK, NULL, ROOT)

MAGIC = b"CODEMIX-FFNN"
FORMAT_VERSION = 1
HIDDEN_SIZE = 200


class Table:
    """A named embedding matrix with its vocabulary."""

    def __init__(self, name: str, words: Sequence[str], matrix: np.ndarray, trainable: bool = True):
        if len(words) != matrix.shape[0]:
            raise ValueError(f"table {name}: {len(words)} words but {matrix.shape[0]} rows")
        self.name = name
        self.words = list(words)
        self.index = {w: i for i, w in enumerate(self.words)}
        self.matrix = np.ascontiguousarray(matrix, dtype=np.float64)
        self.trainable = trainable

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def lookup(self, value: str) -> int:
        return self.index.get(value, 0)


def make_table(name: str, vocabulary: Iterable[str], dim: int, seed: int,
               pretrained: Optional[EmbeddingTable] = None) -> Table:
    """Trainable table over SPECIALS + vocabulary.

    Rows come from ``pretrained`` where available, otherwise uniform in
    [-0.25, 0.25].  The ``<unk>`` row is the pretrained OOV vector or the
    seeded random vector.
    """
    words = list(SPECIALS) + sorted(set(vocabulary) - set(SPECIALS))
    if pretrained is not None:
        dim = pretrained.dimension
    rng = np.random.default_rng(seed)
    matrix = rng.uniform(-INIT_RANGE, INIT_RANGE, size=(len(words), dim))
    matrix[0] = pretrained.oov_vector if pretrained is not None else random_embedding(seed, dim)
    if pretrained is not None:
        for i, w in enumerate(words):
            if w in pretrained.entries:
                matrix[i] = pretrained.entries[w]
    return Table(name, words, matrix)


def language_table(name: str = "lang") -> Table:
    """Frozen 2-dim language-tag table; specials are zero vectors."""
    words = list(SPECIALS) + ["hi", "en"]
    matrix = np.zeros((len(words), 2))
    matrix[3] = language_tag_vector("hi")
    matrix[4] = language_tag_vector("en")
    return Table(name, words, matrix, trainable=False)


class FeedForwardModel:
    def __init__(self, tables: Mapping[str, Table], slots: Sequence[tuple], labels: Sequence[str],
                 hidden_size: int = HIDDEN_SIZE, seed: int = 0, meta: Optional[dict] = None,
                 init: bool = True):
        self.tables = dict(tables)
        self.slots = [tuple(s) for s in slots]
        for slot, table in self.slots:
            if table not in self.tables:
                raise ValueError(f"slot {slot} refers to unknown table {table}")
        self.slot_names = [s for s, _ in self.slots]
        if len(set(self.slot_names)) != len(self.slot_names):
            raise ValueError("duplicate slot names")
        self.labels = list(labels)
        self.label_index = {l: i for i, l in enumerate(self.labels)}
        self.hidden_size = hidden_size
        self.meta = dict(meta or {})
        widths = [self.tables[t].dim for _, t in self.slots]
        self.offsets = np.concatenate([[0], np.cumsum(widths)]).astype(int)
        self.input_width = int(self.offsets[-1])
        if init:
            rng = np.random.default_rng(seed)
            b1 = math.sqrt(6.0 / (self.input_width + hidden_size))
            b2 = math.sqrt(6.0 / (hidden_size + len(self.labels)))
            self.W1 = rng.uniform(-b1, b1, size=(hidden_size, self.input_width))
            self.b1 = np.zeros(hidden_size)
            self.W2 = rng.uniform(-b2, b2, size=(len(self.labels), hidden_size))
            self.b2 = np.zeros(len(self.labels))

    # -- parameters --------------------------------------------------------
    def params(self) -> dict:
        """Trainable parameter arrays by name (live views, not copies)."""
        out = {"W1": self.W1, "b1": self.b1, "W2": self.W2, "b2": self.b2}
        for name, table in self.tables.items():
            if table.trainable:
                out[f"emb:{name}"] = table.matrix
        return out

    def snapshot(self) -> dict:
        return {k: v.copy() for k, v in self.params().items()}

    def restore(self, snap: Mapping[str, np.ndarray]) -> None:
        for k, v in self.params().items():
            v[...] = snap[k]

    # -- encoding ----------------------------------------------------------
    def encode(self, features: Mapping[str, str]) -> np.ndarray:
        ids = np.empty(len(self.slots), dtype=np.int64)
        for j, (slot, table) in enumerate(self.slots):
            try:
                value = features[slot]
            except KeyError:
                raise KeyError(f"feature slot {slot!r} missing from input") from None
            ids[j] = self.tables[table].lookup(value)
        return ids

    def encode_batch(self, batch: Sequence[Mapping[str, str]]) -> np.ndarray:
        if not batch:
            return np.zeros((0, len(self.slots)), dtype=np.int64)
        return np.stack([self.encode(f) for f in batch])

    def inputs(self, ids: np.ndarray) -> np.ndarray:
        parts = [self.tables[t].matrix[ids[:, j]] for j, (_, t) in enumerate(self.slots)]
        return np.concatenate(parts, axis=1)

    # -- inference ---------------------------------------------------------
    def probabilities(self, ids: np.ndarray) -> np.ndarray:
        x = self.inputs(ids)
        h = np.maximum(x @ self.W1.T + self.b1, 0.0)
        return softmax(h @ self.W2.T + self.b2)

    def forward(self, features: Mapping[str, str]) -> np.ndarray:
        return self.probabilities(self.encode(features)[None, :])[0]

    def predict(self, features: Mapping[str, str]) -> str:
        return self.labels[int(np.argmax(self.forward(features)))]


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def forward(model: FeedForwardModel, features: Mapping[str, str]) -> np.ndarray:
    return model.forward(features)


# -- loss and gradients ------------------------------------------------------

def _loss_and_gradients_ids(model: FeedForwardModel, ids: np.ndarray, gold: np.ndarray,
                            l2_lambda: float, mask: Optional[np.ndarray] = None):
    batch = ids.shape[0]
    x = model.inputs(ids)
    pre = x @ model.W1.T + model.b1
    h = np.maximum(pre, 0.0)
    if mask is not None:
        h = h * mask
    probs = softmax(h @ model.W2.T + model.b2)
    rows = np.arange(batch)
    picked = probs[rows, gold]
    with np.errstate(divide="ignore"):
        loss = float(-np.log(picked).mean())
    params = model.params()
    loss += 0.5 * l2_lambda * sum(float(np.sum(p * p)) for p in params.values())

    dz = probs.copy()
    dz[rows, gold] -= 1.0
    dz /= batch
    grads = {
        "W2": dz.T @ h,
        "b2": dz.sum(axis=0),
    }
    dh = dz @ model.W2
    if mask is not None:
        dh = dh * mask
    dh = dh * (pre > 0)
    grads["W1"] = dh.T @ x
    grads["b1"] = dh.sum(axis=0)
    dx = dh @ model.W1
    for j, (_, tname) in enumerate(model.slots):
        table = model.tables[tname]
        if not table.trainable:
            continue
        key = f"emb:{tname}"
        if key not in grads:
            grads[key] = np.zeros_like(table.matrix)
        np.add.at(grads[key], ids[:, j], dx[:, model.offsets[j]:model.offsets[j + 1]])
    for key, p in params.items():
        if key not in grads:
            grads[key] = np.zeros_like(p)
        if l2_lambda:
            grads[key] += l2_lambda * p
    return loss, grads


def loss_and_gradients(model: FeedForwardModel, batch: Sequence[tuple], l2_lambda: float):
    """Mean cross entropy plus (l2_lambda/2)*||theta||^2 and its exact gradient."""
    if not batch:
        raise ValueError("empty batch")
    ids = model.encode_batch([f for f, _ in batch])
    gold = np.array([_label_id(model, y) for _, y in batch], dtype=np.int64)
    return _loss_and_gradients_ids(model, ids, gold, l2_lambda)


def _label_id(model: FeedForwardModel, label: str) -> int:
    try:
        return model.label_index[label]
    except KeyError:
        raise ValueError(f"label {label!r} is not among the model's classes") from None


# -- training ----------------------------------------------------------------

@dataclass
class TrainerConfig:
    learning_rate: float = 0.01
    l2_lambda: float = 1e-8
    dropout_prob: float = 0.5
    batch_size: int = 32
    epochs: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be nonnegative")
        if not 0 <= self.dropout_prob < 1:
            raise ValueError("dropout_prob must be in [0, 1)")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be positive")


class Adagrad:
    def __init__(self, params: Mapping[str, np.ndarray], learning_rate: float, eps: float = 1e-6):
        self.learning_rate = learning_rate
        self.eps = eps
        self.accumulators = {k: np.zeros_like(v) for k, v in params.items()}
        self.steps = 0

    def step(self, params: Mapping[str, np.ndarray], grads: Mapping[str, np.ndarray]) -> None:
        for key, p in params.items():
            g = grads[key]
            acc = self.accumulators[key]
            acc += g * g
            p -= self.learning_rate * g / (np.sqrt(acc) + self.eps)
        self.steps += 1


@dataclass
class TrainResult:
    model: FeedForwardModel
    losses: list = field(default_factory=list)
    dev_scores: list = field(default_factory=list)
    best_epoch: int = 0
    steps: int = 0


class TrainingError(RuntimeError):
    pass


def train(model: FeedForwardModel, data: Sequence[tuple], config: TrainerConfig,
          dev_eval: Optional[Callable[[FeedForwardModel], float]] = None) -> TrainResult:
    """Mini-batch Adagrad training; with ``dev_eval`` the best-scoring epoch is kept."""
    if not data:
        raise ValueError("no training data")
    ids = model.encode_batch([f for f, _ in data])
    gold = np.array([_label_id(model, y) for _, y in data], dtype=np.int64)
    rng = np.random.default_rng(config.seed)
    params = model.params()
    opt = Adagrad(params, config.learning_rate)
    result = TrainResult(model)
    best_score, best_snap = -math.inf, None
    keep = 1.0 - config.dropout_prob
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(data))
        total = 0.0
        for b, start in enumerate(range(0, len(order), config.batch_size), start=1):
            sel = order[start:start + config.batch_size]
            mask = None
            if config.dropout_prob > 0:
                mask = (rng.random((len(sel), model.hidden_size)) < keep) / keep
            loss, grads = _loss_and_gradients_ids(model, ids[sel], gold[sel], config.l2_lambda, mask)
            if not math.isfinite(loss):
                raise TrainingError(f"non-finite loss {loss} at epoch {epoch}, batch {b}")
            opt.step(params, grads)
            total += loss * len(sel)
        result.losses.append(total / len(data))
        if dev_eval is not None:
            score = dev_eval(model)
            result.dev_scores.append(score)
            log.info("epoch %d loss %.4f dev %.4f", epoch, result.losses[-1], score)
            if score > best_score:
                best_score, best_snap, result.best_epoch = score, model.snapshot(), epoch
        else:
            log.info("epoch %d loss %.4f", epoch, result.losses[-1])
            result.best_epoch = epoch
    if best_snap is not None:
        model.restore(best_snap)
    result.steps = opt.steps
    return result


# -- serialization -----------------------------------------------------------

class ModelFormatError(ValueError):
    pass


def save_model(model: FeedForwardModel, stream: BinaryIO) -> None:
    header = {
        "slots": [list(s) for s in model.slots],
        "labels": model.labels,
        "hidden_size": model.hidden_size,
        "meta": model.meta,
        "tables": [
            {"name": t.name, "words": t.words, "dim": t.dim, "trainable": t.trainable}
            for t in model.tables.values()
        ],
    }
    blob = json.dumps(header, ensure_ascii=False).encode("utf-8")
    stream.write(MAGIC)
    stream.write(struct.pack("<IQ", FORMAT_VERSION, len(blob)))
    stream.write(blob)
    for arr in _ordered_arrays(model):
        stream.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def _ordered_arrays(model: FeedForwardModel) -> list:
    return [model.W1, model.b1, model.W2, model.b2] + [t.matrix for t in model.tables.values()]


def _read_exact(stream: BinaryIO, n: int, what: str) -> bytes:
    data = stream.read(n)
    if len(data) != n:
        raise ModelFormatError(f"truncated model file while reading {what}")
    return data


def load_model(stream: BinaryIO) -> FeedForwardModel:
    magic = stream.read(len(MAGIC))
    if magic != MAGIC:
        raise ModelFormatError(f"not a model file: expected magic {MAGIC!r}, found {magic!r}")
    version, size = struct.unpack("<IQ", _read_exact(stream, 12, "header"))
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {version} (expected {FORMAT_VERSION})")
    try:
        header = json.loads(_read_exact(stream, size, "header").decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"corrupt model header: {exc}") from None

    def read_array(shape, what):
        count = int(np.prod(shape))
        raw = _read_exact(stream, 8 * count, what)
        return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(shape)

    hidden = header["hidden_size"]
    n_labels = len(header["labels"])
    width = sum(next(t["dim"] for t in header["tables"] if t["name"] == tn)
                for _, tn in header["slots"])
    W1 = read_array((hidden, width), "W1")
    b1 = read_array((hidden,), "b1")
    W2 = read_array((n_labels, hidden), "W2")
    b2 = read_array((n_labels,), "b2")
    tables = {}
    for t in header["tables"]:
        matrix = read_array((len(t["words"]), t["dim"]), f"table {t['name']}")
        tables[t["name"]] = Table(t["name"], t["words"], matrix, t["trainable"])
    model = FeedForwardModel(tables, header["slots"], header["labels"], hidden,
                             meta=header["meta"], init=False)
    model.W1, model.b1, model.W2, model.b2 = W1, b1, W2, b2
    return model


def save_model_file(model: FeedForwardModel, path) -> None:
    with open(path, "wb") as f:
        save_model(model, f)


def load_model_file(path) -> FeedForwardModel:
    with open(path, "rb") as f:
        return load_model(f)
