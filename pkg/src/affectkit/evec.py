"""Emotional word vectors from a small convolutional text classifier.

The network embeds tokens, applies 1-d convolutions of several widths with
tanh, max-pools each filter over time, and classifies the pooled vector
with one affine layer and softmax.  After training on hashtag-labeled
documents the embedding rows are exported as word vectors.

Everything is plain numpy with hand-written backpropagation.  Row 0 of the
embedding matrix is the padding vector and stays exactly zero.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataio import WordVectorTable, array_from_payload, array_payload

PAD = 0


@dataclass
class EvecConfig:
    emb_dim: int = 300
    filter_widths: tuple[int, ...] = (3, 4, 5)
    filters_per_width: int = 64
    classes: tuple[str, ...] = ("joy", "sadness", "anger", "fear")
    lr: float = 0.5
    l2: float = 1e-4
    epochs: int = 20
    batch: int = 16
    seed: int = 0
    patience: int = 3
    min_count: int = 1

    def __post_init__(self):
        self.filter_widths = tuple(int(w) for w in self.filter_widths)
        self.classes = tuple(self.classes)
        if self.emb_dim < 1:
            raise ValueError("emb_dim must be >= 1")
        if not self.filter_widths or min(self.filter_widths) < 1:
            raise ValueError("filter widths must be >= 1")
        if self.filters_per_width < 1:
            raise ValueError("filters_per_width must be >= 1")
        if len(self.classes) < 2 or len(set(self.classes)) != len(self.classes):
            raise ValueError("need at least 2 distinct classes")
        if self.batch < 1 or self.epochs < 0 or self.patience < 1:
            raise ValueError("batch and patience must be >= 1, epochs >= 0")

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})


class EvecModel:
    model_kind = "evec"

    def __init__(self, vocab: dict[str, int], params: dict[str, np.ndarray], widths, classes):
        self.vocab = dict(vocab)
        self.params = params
        self.widths = tuple(int(w) for w in widths)
        self.classes = tuple(classes)

    @property
    def emb_dim(self) -> int:
        return self.params["E"].shape[1]

    @property
    def n_filters(self) -> int:
        return self.params[f"conv{self.widths[0]}.W"].shape[0]

    def encode(self, tokens: Sequence[str]) -> np.ndarray:
        """Token ids, with unknown tokens mapped to the padding row."""
        return np.array([self.vocab.get(t, PAD) for t in tokens], dtype=np.int64)

    def predict(self, seq) -> np.ndarray:
        return forward(self, seq)[0]

    def copy(self) -> "EvecModel":
        return EvecModel(self.vocab, {k: v.copy() for k, v in self.params.items()},
                         self.widths, self.classes)

    def to_payload(self):
        tokens = sorted(self.vocab, key=self.vocab.get)
        return {"kind": "evec", "tokens": tokens, "widths": list(self.widths),
                "classes": list(self.classes),
                "params": {k: array_payload(v) for k, v in sorted(self.params.items())}}

    @classmethod
    def from_payload(cls, p):
        vocab = {t: i + 1 for i, t in enumerate(p["tokens"])}
        params = {k: array_from_payload(v) for k, v in p["params"].items()}
        return cls(vocab, params, p["widths"], p["classes"])


def init_model(vocab_tokens: Sequence[str], config: EvecConfig, rng=None) -> EvecModel:
    """Uniform init in +-1/sqrt(fan_in).  For the embedding the fan-in is
    taken as its dimension; the padding row is zero."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    d, F, K = config.emb_dim, config.filters_per_width, len(config.classes)
    V = len(vocab_tokens) + 1

    def uniform(shape, fan_in):
        a = 1.0 / math.sqrt(fan_in)
        return rng.uniform(-a, a, size=shape)

    params = {"E": uniform((V, d), d)}
    params["E"][PAD] = 0.0
    for w in config.filter_widths:
        params[f"conv{w}.W"] = uniform((F, w * d), w * d)
        params[f"conv{w}.b"] = uniform((F,), w * d)
    total = F * len(config.filter_widths)
    params["out.W"] = uniform((total, K), total)
    params["out.b"] = uniform((K,), total)
    vocab = {t: i + 1 for i, t in enumerate(vocab_tokens)}
    return EvecModel(vocab, params, config.filter_widths, config.classes)


def _pad(model: EvecModel, seq) -> np.ndarray:
    seq = np.asarray(seq, dtype=np.int64).ravel()
    V = model.params["E"].shape[0]
    if seq.size and (seq.min() < 0 or seq.max() >= V):
        raise IndexError(f"token index out of range [0, {V})")
    need = max(model.widths)
    if seq.size < need:
        seq = np.concatenate([seq, np.full(need - seq.size, PAD, dtype=np.int64)])
    return seq


def _softmax(z):
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _forward_batch(model: EvecModel, seqs):
    """Forward pass over already padded sequences.

    Windows of all sequences are stacked into one matrix per filter width
    (windows never straddle two sequences), so each width costs one matmul.
    """
    p = model.params
    d = model.emb_dim
    lengths = np.array([len(s) for s in seqs])
    tok = np.concatenate(seqs)
    X = p["E"][tok]
    offsets = np.concatenate([[0], np.cumsum(lengths)[:-1]])
    pooled, cache = [], []
    for w in model.widths:
        n_win = lengths - w + 1
        starts = np.concatenate([o + np.arange(n) for o, n in zip(offsets, n_win)])
        windows = X[starts[:, None] + np.arange(w)].reshape(-1, w * d)
        pre = windows @ p[f"conv{w}.W"].T + p[f"conv{w}.b"]
        seg = np.concatenate([[0], np.cumsum(n_win)[:-1]])
        # row of the maximal window per (sequence, filter); first one on ties
        arg = np.stack([a + np.argmax(pre[a:a + n], axis=0) for a, n in zip(seg, n_win)])
        h = np.tanh(np.take_along_axis(pre, arg, axis=0))
        pooled.append(h)
        cache.append((w, starts, windows, arg, h))
    pooled = np.hstack(pooled)
    probs = _softmax(pooled @ p["out.W"] + p["out.b"])
    return probs, pooled, (tok, X.shape[0], cache)


def forward(model: EvecModel, seq):
    """Class probabilities and the pooled feature vector for one sequence."""
    probs, pooled, _ = _forward_batch(model, [_pad(model, seq)])
    return probs[0], pooled[0]


def _penalty(model, l2):
    if not l2:
        return 0.0
    p = model.params
    total = float(np.sum(p["out.W"] ** 2))
    for w in model.widths:
        total += float(np.sum(p[f"conv{w}.W"] ** 2))
    return 0.5 * l2 * total


def _targets(model, labels):
    class_index = {c: i for i, c in enumerate(model.classes)}
    return np.array([int(y) if isinstance(y, (int, np.integer)) else class_index[y] for y in labels])


def _batch_grads(model: EvecModel, batch, l2):
    """Loss and gradients; the embedding gradient is returned sparsely as
    ``(row ids, rows)`` with the padding row excluded."""
    if len(batch) == 0:
        raise ValueError("empty batch")
    p = model.params
    d = model.emb_dim
    n = len(batch)
    seqs = [_pad(model, s) for s, _ in batch]
    y = _targets(model, [lab for _, lab in batch])
    probs, pooled, (tok, n_tok, cache) = _forward_batch(model, seqs)
    loss = -float(np.sum(np.log(np.maximum(probs[np.arange(n), y], 1e-300)))) / n
    loss += _penalty(model, l2)

    grads = {}
    dz = probs.copy()
    dz[np.arange(n), y] -= 1.0
    dz /= n
    grads["out.W"] = pooled.T @ dz
    grads["out.b"] = dz.sum(axis=0)
    dpooled = dz @ p["out.W"].T
    dX = np.zeros((n_tok, d))
    offset = 0
    for w, starts, windows, arg, h in cache:
        F = h.shape[1]
        dpre = dpooled[:, offset:offset + F] * (1.0 - h * h)
        offset += F
        # scatter dpre onto the argmax windows: S is (n_windows, F)
        S = np.zeros((windows.shape[0], F))
        np.add.at(S, (arg.ravel(), np.tile(np.arange(F), n)), dpre.ravel())
        grads[f"conv{w}.W"] = S.T @ windows
        grads[f"conv{w}.b"] = dpre.sum(axis=0)
        G = (S @ p[f"conv{w}.W"]).reshape(-1, w, d)
        for s in range(w):
            dX[starts + s] += G[:, s, :]
    if l2:
        grads["out.W"] += l2 * p["out.W"]
        for w in model.widths:
            grads[f"conv{w}.W"] += l2 * p[f"conv{w}.W"]
    keep = tok != PAD
    uniq, inv = np.unique(tok[keep], return_inverse=True)
    acc = np.zeros((uniq.size, d))
    np.add.at(acc, inv, dX[keep])
    return loss, grads, (uniq, acc)


def loss_and_gradients(model: EvecModel, batch, l2: float = 0.0):
    """Mean cross-entropy (+ 0.5 * l2 * squared filter/output weights) and
    dense gradients for every parameter, keyed like ``model.params``."""
    loss, grads, (ids, rows) = _batch_grads(model, batch, l2)
    dE = np.zeros_like(model.params["E"])
    dE[ids] = rows
    grads["E"] = dE
    return loss, grads


def _probs(model, seqs, chunk=256):
    out = []
    for a in range(0, len(seqs), chunk):
        out.append(_forward_batch(model, [_pad(model, s) for s in seqs[a:a + chunk]])[0])
    return np.vstack(out)


def mean_loss(model: EvecModel, data, l2: float = 0.0) -> float:
    if not data:
        return math.nan
    probs = _probs(model, [s for s, _ in data])
    y = _targets(model, [lab for _, lab in data])
    ce = -np.log(np.maximum(probs[np.arange(len(y)), y], 1e-300))
    return float(ce.mean()) + _penalty(model, l2)


def accuracy(model: EvecModel, data) -> float:
    probs = _probs(model, [s for s, _ in data])
    y = _targets(model, [lab for _, lab in data])
    return float(np.mean(np.argmax(probs, axis=1) == y))


def build_vocab(corpus, min_count: int = 1) -> list[str]:
    counts = Counter(t for toks, _ in corpus for t in toks)
    return sorted((t for t, c in counts.items() if c >= min_count), key=lambda t: (-counts[t], t))


@dataclass
class TrainLog:
    train_loss: list[float] = field(default_factory=list)
    dev_loss: list[float] = field(default_factory=list)
    best_epoch: int = 0


def train_evec(corpus, dev, config: EvecConfig | None = None, log: TrainLog | None = None) -> EvecModel:
    """Mini-batch SGD with early stopping on dev cross-entropy.

    ``corpus`` and ``dev`` are lists of ``(tokens, class label)``.  The
    returned model is the snapshot with the lowest dev loss.  Results depend
    only on the corpus order and ``config.seed``.
    """
    config = config or EvecConfig()
    corpus = list(corpus)
    dev = list(dev or [])
    if not corpus:
        raise ValueError("empty training corpus")
    labels = {y for _, y in corpus}
    unknown = labels - set(config.classes)
    if unknown:
        raise ValueError(f"corpus labels not in configured classes: {sorted(unknown)}")
    missing = [c for c in config.classes if c not in labels]
    if missing:
        raise ValueError(f"classes absent from training corpus: {missing}")
    rng = np.random.default_rng(config.seed)
    model = init_model(build_vocab(corpus, config.min_count), config, rng)
    train = [(model.encode(t), y) for t, y in corpus]
    dev_enc = [(model.encode(t), y) for t, y in dev]
    log = log if log is not None else TrainLog()

    best = model.copy()
    best_loss = mean_loss(model, dev_enc, config.l2) if dev_enc else math.inf
    stale = 0
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(train))
        for start in range(0, len(order), config.batch):
            batch = [train[k] for k in order[start:start + config.batch]]
            _, grads, (ids, rows) = _batch_grads(model, batch, config.l2)
            for k, g in grads.items():
                model.params[k] -= config.lr * g
            model.params["E"][ids] -= config.lr * rows
        log.train_loss.append(mean_loss(model, train, config.l2))
        if dev_enc:
            dev_loss = mean_loss(model, dev_enc, config.l2)
            log.dev_loss.append(dev_loss)
            if dev_loss < best_loss:
                best_loss, best, stale = dev_loss, model.copy(), 0
                log.best_epoch = epoch
            else:
                stale += 1
                if stale >= config.patience:
                    break
        else:
            best = model
            log.best_epoch = epoch
    return best.copy()


def export_vectors(model: EvecModel) -> WordVectorTable:
    tokens = sorted(model.vocab, key=model.vocab.get)
    rows = [model.vocab[t] for t in tokens]
    return WordVectorTable(tokens, model.params["E"][rows])
