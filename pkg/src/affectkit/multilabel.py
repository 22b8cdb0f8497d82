"""Multi-label emotion classification.

Two models share the same inputs (an M x N feature matrix and an M x C
binary label matrix):

* a linear regression W x whose loss adds lam * y'^T L y' for the Laplacian
  L of a label graph built from label co-occurrence;
* an ensemble of logistic-regression classifier chains over shuffled label
  orders.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import expit as _sigmoid

from .dataio import array_from_payload, array_payload
from .errors import DivergenceError
from .evaluation import jaccard_multilabel

DEFAULT_LAMBDA = -1e-4
DEFAULT_LR = 1.0
INIT_STD = 0.1
LOSS_TOL = 1e-9
THRESHOLD_STEP = 0.01


def cooccurrence(Y) -> np.ndarray:
    """O = Y^T Y: off-diagonal pair counts, label counts on the diagonal."""
    Y = np.asarray(Y)
    if Y.size and not np.isin(Y, (0, 1)).all():
        raise ValueError("label matrix must be binary")
    Y = Y.astype(np.int64)
    return Y.T @ Y


class LabelGraph(NamedTuple):
    A: np.ndarray
    D: np.ndarray
    L: np.ndarray


def laplacian(O) -> LabelGraph:
    """Graph over labels with edge weight = squared distance of O's rows."""
    O = np.asarray(O, dtype=np.float64)
    if O.ndim != 2 or O.shape[0] != O.shape[1]:
        raise ValueError("co-occurrence matrix must be square")
    diff = O[:, None, :] - O[None, :, :]
    A = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(A, 0.0)
    D = np.diag(A.sum(axis=1))
    return LabelGraph(A, D, D - A)


# ---------------------------------------------------------------------------
# regularized linear regression

class MultiLabelModel:
    model_kind = "rlr"

    def __init__(self, W, L, lam, thresholds=None, label_names=None, n_iter=0):
        self.W = np.asarray(W, dtype=np.float64)
        self.L = np.asarray(L, dtype=np.float64)
        self.lam = float(lam)
        C = self.W.shape[0]
        if self.L.shape != (C, C):
            raise ValueError(f"Laplacian must be {C}x{C}")
        if thresholds is None:
            thresholds = np.full(C, 0.5)
        self.thresholds = np.broadcast_to(np.asarray(thresholds, dtype=np.float64), (C,)).copy()
        if not np.all(np.isfinite(self.thresholds)):
            raise ValueError("thresholds must be finite")
        self.label_names = list(label_names) if label_names is not None else None
        self.n_iter = int(n_iter)

    @property
    def n_labels(self):
        return self.W.shape[0]

    @property
    def n_features(self):
        return self.W.shape[1]

    def scores(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[-1]}")
        return X @ self.W.T

    def predict(self, X):
        return predict_rlr(self, X)[1]

    def to_payload(self):
        return {"kind": "rlr", "W": array_payload(self.W), "L": array_payload(self.L),
                "lam": self.lam, "thresholds": array_payload(self.thresholds),
                "label_names": self.label_names, "n_iter": self.n_iter}

    @classmethod
    def from_payload(cls, p):
        return cls(array_from_payload(p["W"]), array_from_payload(p["L"]), p["lam"],
                   array_from_payload(p["thresholds"]), p.get("label_names"), p.get("n_iter", 0))


def rlr_loss(W, X, Y, L, lam) -> float:
    P = X @ W.T
    R = P - Y
    M = X.shape[0]
    return float((np.sum(R * R) + lam * np.sum((P @ L) * P)) / M)


def rlr_gradient(W, X, Y, L, lam) -> np.ndarray:
    """d loss / d W = (2/M) (P - Y + lam P L)^T X, using L symmetric."""
    P = X @ W.T
    M = X.shape[0]
    return (2.0 / M) * ((P - Y) + lam * (P @ L)).T @ X


def is_bounded(L, lam) -> bool:
    """True when the per-sample loss in y' is bounded below, i.e. I + lam L is PSD."""
    if lam >= 0:
        return True
    return 1.0 + lam * float(np.linalg.eigvalsh(np.asarray(L, dtype=np.float64)).max()) >= 0.0


def train_rlr(X, Y, L, lam: float = DEFAULT_LAMBDA, lr: float = DEFAULT_LR, iters: int = 1000,
              seed: int = 0, tol: float = LOSS_TOL, label_names=None) -> MultiLabelModel:
    """Full-batch gradient descent on mean squared error plus the label-graph term.

    W starts from N(0, 0.1^2) drawn with ``seed``.  Stops after ``iters``
    steps or once the loss changes by less than ``tol``.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
        raise ValueError("X and Y must be 2-d with the same number of rows")
    if L.shape != (Y.shape[1], Y.shape[1]):
        raise ValueError("Laplacian shape does not match the label count")
    if not is_bounded(L, lam):
        warnings.warn(f"lam={lam} makes the loss unbounded below for this label graph; "
                      "gradient descent will run until iters or divergence", RuntimeWarning,
                      stacklevel=2)
    rng = np.random.default_rng(seed)
    W = rng.normal(0.0, INIT_STD, size=(Y.shape[1], X.shape[1]))
    loss = rlr_loss(W, X, Y, L, lam)
    it = 0
    for it in range(1, iters + 1):
        # overflow is reported as a DivergenceError below, not as numpy warnings
        with np.errstate(over="ignore", invalid="ignore"):
            W = W - lr * rlr_gradient(W, X, Y, L, lam)
            new_loss = rlr_loss(W, X, Y, L, lam)
        if not (math.isfinite(new_loss) and np.all(np.isfinite(W))):
            raise DivergenceError(f"loss became non-finite at iteration {it}", iteration=it)
        done = abs(loss - new_loss) < tol
        loss = new_loss
        if done:
            break
    return MultiLabelModel(W, L, lam, None, label_names, n_iter=it)


def predict_rlr(model: MultiLabelModel, x):
    """Scores W x and the labels whose score reaches its threshold."""
    s = model.scores(x)
    return s, (s >= model.thresholds).astype(np.int64)


def tune_thresholds(scores, Y, step: float = THRESHOLD_STEP, init: float = 0.5) -> np.ndarray:
    """Per-label threshold sweep over [0,1] maximizing dev Jaccard.

    Labels are visited in order, each swept with the others held at their
    current values.  Ties keep the smallest threshold.
    """
    scores = np.asarray(scores, dtype=np.float64)
    Y = np.asarray(Y)
    C = scores.shape[1]
    grid = np.round(np.arange(0, int(round(1 / step)) + 1) * step, 10)
    th = np.full(C, float(init))
    for j in range(C):
        best_t, best = th[j], -1.0
        for t in grid:
            th[j] = t
            s = jaccard_multilabel(Y, scores >= th)
            if s > best:
                best_t, best = t, s
        th[j] = best_t
    return th


# ---------------------------------------------------------------------------
# classifier chains

def fit_logistic(X, y, l2=1e-3, lr=0.5, iters=2000, tol=1e-6):
    """L2-regularized binary logistic regression by batch gradient descent.

    Returns ``(w, b)``.  The bias is not penalized.  A constant target gives
    an intercept-only model with a Laplace-smoothed rate.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    M, N = X.shape
    w = np.zeros(N)
    if y.min() == y.max():
        p = (y.sum() + 1.0) / (M + 2.0)
        return w, float(math.log(p / (1.0 - p)))
    b = 0.0
    for _ in range(iters):
        r = _sigmoid(X @ w + b) - y
        gw = X.T @ r / M + l2 * w
        gb = r.mean()
        if math.sqrt(float(gw @ gw) + gb * gb) < tol:
            break
        w = w - lr * gw
        b = b - lr * gb
    return w, float(b)


@dataclass
class Chain:
    order: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[float]

    def predict_proba(self, X) -> np.ndarray:
        """Per-label probabilities (label order, not chain order), feeding
        each classifier the hard 0/1 decisions of the ones before it."""
        X = np.asarray(X, dtype=np.float64)
        M = X.shape[0]
        probs = np.zeros((M, len(self.order)))
        prev = np.zeros((M, 0))
        for pos, label in enumerate(self.order):
            z = np.hstack([X, prev]) @ self.weights[pos] + self.biases[pos]
            p = _sigmoid(z)
            probs[:, label] = p
            prev = np.hstack([prev, (p >= 0.5).astype(np.float64)[:, None]])
        return probs


def train_chain(X, Y, order: Sequence[int], l2=1e-3, lr=0.5, iters=2000, tol=1e-6) -> Chain:
    """One chain: position j sees x plus the true labels at order[:j]."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    C = Y.shape[1]
    order = tuple(int(o) for o in order)
    if sorted(order) != list(range(C)):
        raise ValueError(f"order must be a permutation of range({C})")
    weights, biases = [], []
    for pos, label in enumerate(order):
        inputs = np.hstack([X, Y[:, list(order[:pos])]])
        w, b = fit_logistic(inputs, Y[:, label], l2, lr, iters, tol)
        weights.append(w)
        biases.append(b)
    return Chain(order, weights, biases)


class ChainEnsemble:
    model_kind = "chains"

    def __init__(self, chains: Sequence[Chain], threshold=0.5, label_names=None):
        if not chains:
            raise ValueError("ensemble needs at least one chain")
        self.chains = list(chains)
        self.threshold = float(threshold)
        self.label_names = list(label_names) if label_names is not None else None
        C = len(self.chains[0].order)
        N = self.chains[0].weights[0].shape[0]
        for ch in self.chains:
            if len(ch.order) != C or ch.weights[0].shape[0] != N:
                raise ValueError("all chains must share label count and feature count")
            for pos, w in enumerate(ch.weights):
                if w.shape[0] != N + pos:
                    raise ValueError("chain weight length must be N + position")

    @property
    def n_labels(self):
        return len(self.chains[0].order)

    @property
    def n_features(self):
        return self.chains[0].weights[0].shape[0]

    def predict(self, X):
        return predict_chain_ensemble(self, X, self.threshold)[1]

    def to_payload(self):
        return {
            "kind": "chains",
            "threshold": self.threshold,
            "label_names": self.label_names,
            "chains": [
                {"order": list(ch.order), "weights": [array_payload(w) for w in ch.weights],
                 "biases": [float(b) for b in ch.biases]}
                for ch in self.chains
            ],
        }

    @classmethod
    def from_payload(cls, p):
        chains = [Chain(tuple(c["order"]), [array_from_payload(w) for w in c["weights"]],
                        [float(b) for b in c["biases"]]) for c in p["chains"]]
        return cls(chains, p["threshold"], p.get("label_names"))


def train_chain_ensemble(X, Y, n_chains=10, seed=0, l2=1e-3, lr=0.5, iters=2000, tol=1e-6,
                         threshold=0.5, label_names=None) -> ChainEnsemble:
    """Chains over random label orders; chain i draws its order with seed + i."""
    C = np.asarray(Y).shape[1]
    chains = []
    for i in range(n_chains):
        order = np.random.default_rng(seed + i).permutation(C)
        chains.append(train_chain(X, Y, order, l2, lr, iters, tol))
    return ChainEnsemble(chains, threshold, label_names)


def predict_chain_ensemble(ensemble: ChainEnsemble, x, threshold=0.5):
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.shape[1] != ensemble.n_features:
        raise ValueError(f"expected {ensemble.n_features} features, got {X.shape[1]}")
    probs = np.mean([ch.predict_proba(X) for ch in ensemble.chains], axis=0)
    labels = (probs >= threshold).astype(np.int64)
    if single:
        return probs[0], labels[0]
    return probs, labels


def ensemble_multilabel(rlr_scores, chain_probs, weights=(0.5, 0.5), thresholds=0.5):
    """Threshold the weighted mean of RLR scores and chain probabilities."""
    a = np.asarray(rlr_scores, dtype=np.float64)
    b = np.asarray(chain_probs, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"member outputs differ in shape: {a.shape} vs {b.shape}")
    w_rlr, w_cc = float(weights[0]), float(weights[1])
    if w_rlr + w_cc == 0:
        raise ValueError("ensemble weights sum to zero")
    combined = (w_rlr * a + w_cc * b) / (w_rlr + w_cc)
    return (combined >= np.asarray(thresholds, dtype=np.float64)).astype(np.int64)
