"""Kernel ridge regression and epsilon-SVR in dual form, dev-set grid search
and prediction-averaging ensembles."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .dataio import array_from_payload, array_payload
from .errors import ConvergenceError, NumericalError, UndefinedCorrelationError
from .evaluation import pearson

KRR_JITTER = 1e-10
KRR_JITTER_RETRIES = 3
SVR_TOL = 1e-3
SVR_MAX_ITER = 100_000
_TAU = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    gamma: float | None = None
    degree: int = 3
    coef0: float = 0.0

    def __post_init__(self):
        if self.kind not in ("linear", "rbf", "poly"):
            raise ValueError(f"unknown kernel {self.kind!r}")
        if self.kind in ("rbf", "poly") and not (self.gamma is not None and self.gamma > 0):
            raise ValueError(f"{self.kind} kernel needs gamma > 0")
        if self.kind == "poly" and int(self.degree) < 1:
            raise ValueError("poly kernel needs degree >= 1")

    def to_dict(self):
        return {"kind": self.kind, "gamma": self.gamma, "degree": int(self.degree),
                "coef0": self.coef0}

    @classmethod
    def from_dict(cls, d):
        return cls(d.get("kind", "rbf"), d.get("gamma"), int(d.get("degree", 3)),
                   float(d.get("coef0", 0.0)))


def kernel_matrix(spec: KernelSpec, A, B=None) -> np.ndarray:
    """k(a_i, b_j) for all rows.  With ``B`` omitted the Gram matrix of ``A``
    is returned exactly symmetric (and with unit diagonal for RBF)."""
    A = np.asarray(A, dtype=np.float64)
    gram = B is None
    B = A if gram else np.asarray(B, dtype=np.float64)
    dots = A @ B.T
    if gram:
        dots = (dots + dots.T) / 2
    if spec.kind == "linear":
        return dots
    if spec.kind == "poly":
        return (spec.gamma * dots + spec.coef0) ** int(spec.degree)
    sq = np.einsum("ij,ij->i", A, A)[:, None] + np.einsum("ij,ij->i", B, B)[None, :] - 2 * dots
    np.maximum(sq, 0.0, out=sq)
    if gram:
        sq = (sq + sq.T) / 2
        np.fill_diagonal(sq, 0.0)
    return np.exp(-spec.gamma * sq)


class KernelModel:
    """A fitted dual-form regressor: f(x) = sum_i coef_i k(x_i, x) + bias."""

    def __init__(self, kind, kernel: KernelSpec, support_inputs, dual_coeffs, bias=0.0, hyper=None):
        if kind not in ("krr", "svr"):
            raise ValueError(f"unknown model kind {kind!r}")
        self.kind = kind
        self.kernel = kernel
        self.support_inputs = np.asarray(support_inputs, dtype=np.float64)
        self.dual_coeffs = np.asarray(dual_coeffs, dtype=np.float64)
        self.bias = float(bias)
        self.hyper = dict(hyper or {})
        if self.support_inputs.ndim != 2 or self.support_inputs.shape[0] != self.dual_coeffs.shape[0]:
            raise ValueError("one dual coefficient per support row required")

    @property
    def n_features(self) -> int:
        return self.support_inputs.shape[1]

    def predict(self, X) -> np.ndarray:
        return predict(self, X)

    def to_payload(self):
        return {
            "kind": self.kind,
            "kernel": self.kernel.to_dict(),
            "support_inputs": array_payload(self.support_inputs),
            "dual_coeffs": array_payload(self.dual_coeffs),
            "bias": self.bias,
            "hyper": self.hyper,
        }

    @classmethod
    def from_payload(cls, p):
        return cls(p["kind"], KernelSpec.from_dict(p["kernel"]),
                   array_from_payload(p["support_inputs"]), array_from_payload(p["dual_coeffs"]),
                   p["bias"], p.get("hyper"))


def _check_xy(X, y, min_rows):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2:
        raise ValueError("X must be a 2-d matrix")
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if X.shape[0] < min_rows:
        raise ValueError(f"need at least {min_rows} training rows, got {X.shape[0]}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("training data must be finite")
    return X, y


def fit_krr(X, y, kernel: KernelSpec, lam: float) -> KernelModel:
    """Solve (K + lam I) alpha = y by Cholesky, adding jitter only on failure."""
    if not lam > 0:
        raise ValueError("ridge parameter must be > 0")
    X, y = _check_xy(X, y, 1)
    K = kernel_matrix(kernel, X)
    K[np.diag_indices_from(K)] += lam
    jitter = 0.0
    for attempt in range(KRR_JITTER_RETRIES + 1):
        try:
            factor = cho_factor(K + jitter * np.eye(len(y)) if jitter else K, lower=True,
                                check_finite=False)
            break
        except LinAlgError:
            jitter = KRR_JITTER if attempt == 0 else jitter * 10
    else:
        raise NumericalError(f"kernel matrix not positive definite even with jitter {jitter:g}")
    alpha = cho_solve(factor, y, check_finite=False)
    return KernelModel("krr", kernel, X.copy(), alpha, 0.0, {"lam": float(lam)})


def fit_svr(X, y, kernel: KernelSpec, C: float, epsilon: float,
            tol: float = SVR_TOL, max_iter: int = SVR_MAX_ITER) -> KernelModel:
    """Epsilon-insensitive SVR solved in the dual by SMO.

    The 2M-variable dual (one multiplier per side of the tube) is optimized
    two coordinates at a time, picking the maximal violating pair with
    second-order gain, until the KKT gap drops below ``tol``.
    """
    if not C > 0:
        raise ValueError("C must be > 0")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    X, y = _check_xy(X, y, 2)
    m = len(y)
    K = kernel_matrix(kernel, X)
    Kdiag = np.diag(K).copy()

    # t < m: alpha^+ (sign +1), t >= m: alpha^- (sign -1)
    sign = np.concatenate([np.ones(m), -np.ones(m)])
    alpha = np.zeros(2 * m)
    grad = np.concatenate([epsilon - y, epsilon + y])
    src = np.concatenate([np.arange(m), np.arange(m)])
    kd = Kdiag[src]

    gap = math.inf
    for it in range(max_iter + 1):
        up = np.where(sign > 0, alpha < C, alpha > 0)
        low = np.where(sign > 0, alpha > 0, alpha < C)
        score = -sign * grad
        up_scores = np.where(up, score, -np.inf)
        i = int(np.argmax(up_scores))
        gmax = up_scores[i]
        low_scores = np.where(low, score, np.inf)
        gmin = low_scores.min()
        gap = gmax - gmin
        if gap < tol:
            break
        if it == max_iter:
            raise ConvergenceError(
                f"SVR did not converge in {max_iter} pair updates; final KKT violation {gap:.3g}",
                violation=float(gap),
            )
        ki = K[src[i]][src]
        b = gmax - score
        a = kd[i] + kd - 2.0 * ki
        a = np.where(a > 0, a, _TAU)
        gain = np.where(low & (b > 0), -(b * b) / a, np.inf)
        j = int(np.argmin(gain))

        step = b[j] / a[j]
        cap_i = C - alpha[i] if sign[i] > 0 else alpha[i]
        cap_j = alpha[j] if sign[j] > 0 else C - alpha[j]
        step = min(step, cap_i, cap_j)
        alpha[i] += sign[i] * step
        alpha[j] -= sign[j] * step
        # land exactly on the box when a bound was the binding constraint
        if step == cap_i:
            alpha[i] = C if sign[i] > 0 else 0.0
        if step == cap_j:
            alpha[j] = 0.0 if sign[j] > 0 else C
        alpha[i] = min(max(alpha[i], 0.0), C)
        alpha[j] = min(max(alpha[j], 0.0), C)
        kj = K[src[j]][src]
        grad += step * sign * (ki - kj)

    coef = alpha[:m] - alpha[m:]
    rho = _svr_rho(sign, alpha, grad, C)
    keep = coef != 0.0
    return KernelModel("svr", kernel, X[keep].copy(), coef[keep], -rho,
                       {"C": float(C), "epsilon": float(epsilon), "kkt_gap": float(gap),
                        "n_iter": it})


def _svr_rho(sign, alpha, grad, C):
    yg = sign * grad
    free = (alpha > 0) & (alpha < C)
    if np.any(free):
        return float(yg[free].mean())
    ub_mask = np.where(sign > 0, alpha >= C, alpha <= 0)
    lb_mask = np.where(sign > 0, alpha <= 0, alpha >= C)
    ub = yg[ub_mask | ~lb_mask].min() if np.any(ub_mask | ~lb_mask) else math.inf
    lb = yg[lb_mask | ~ub_mask].max() if np.any(lb_mask | ~ub_mask) else -math.inf
    return float((ub + lb) / 2)


def predict(model: KernelModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1) if X.size else np.zeros((0, model.n_features))
    if X.shape[0] == 0:
        return np.zeros(0)
    if X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} feature columns, got {X.shape[1]}")
    if model.dual_coeffs.shape[0] == 0:
        return np.full(X.shape[0], model.bias)
    return kernel_matrix(model.kernel, X, model.support_inputs) @ model.dual_coeffs + model.bias


# ---------------------------------------------------------------------------
# grid search and ensembles

@dataclass(frozen=True)
class RegressionConfig:
    method: str
    kernel: KernelSpec
    lam: float | None = None
    C: float | None = None
    epsilon: float | None = None

    def __post_init__(self):
        if self.method == "krr":
            if self.lam is None:
                raise ValueError("krr config needs lam")
        elif self.method == "svr":
            if self.C is None or self.epsilon is None:
                raise ValueError("svr config needs C and epsilon")
        else:
            raise ValueError(f"unknown method {self.method!r}")

    def fit(self, X, y) -> KernelModel:
        if self.method == "krr":
            return fit_krr(X, y, self.kernel, self.lam)
        return fit_svr(X, y, self.kernel, self.C, self.epsilon)

    def to_dict(self):
        d = {"method": self.method, "kernel": self.kernel.to_dict()}
        if self.method == "krr":
            d["lam"] = self.lam
        else:
            d["C"], d["epsilon"] = self.C, self.epsilon
        return d

    @classmethod
    def from_dict(cls, d):
        hyper = d.get("hyperparameters", d)
        kernel = d.get("kernel", {"kind": "rbf"})
        if isinstance(kernel, str):
            kernel = {"kind": kernel, **{k: hyper[k] for k in ("gamma", "degree", "coef0") if k in hyper}}
        return cls(d["method"], KernelSpec.from_dict(kernel), hyper.get("lam"), hyper.get("C"),
                   hyper.get("epsilon"))

    def label(self) -> str:
        k = self.kernel
        kern = k.kind if k.gamma is None else f"{k.kind}(gamma={k.gamma:g})"
        if self.method == "krr":
            return f"krr {kern} lam={self.lam:g}"
        return f"svr {kern} C={self.C:g} eps={self.epsilon:g}"


def default_grid(n_features: int) -> list[RegressionConfig]:
    gammas = [1.0 / n_features, 0.1 / n_features, 10.0 / n_features]
    grid = []
    for g in gammas:
        for lam in (1e-3, 1e-2, 0.1, 1.0):
            grid.append(RegressionConfig("krr", KernelSpec("rbf", g), lam=lam))
    for g in gammas:
        for C in (0.1, 1.0, 10.0):
            for eps in (0.01, 0.05, 0.1):
                grid.append(RegressionConfig("svr", KernelSpec("rbf", g), C=C, epsilon=eps))
    return grid


def read_grid(path) -> list[RegressionConfig]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return [RegressionConfig.from_dict(d) for d in doc]


@dataclass
class GridResult:
    scores: list[float]
    flagged: list[int]
    best_index: int
    best_config: RegressionConfig
    model: KernelModel
    configs: list[RegressionConfig] = field(default_factory=list)

    @property
    def best_score(self) -> float:
        return self.scores[self.best_index]

    def to_dict(self):
        return {
            "best_index": self.best_index,
            "best_score": self.best_score,
            "best_config": self.best_config.to_dict(),
            "results": [
                {"config": c.to_dict(), "dev_pearson": s if math.isfinite(s) else None,
                 "undefined": i in self.flagged}
                for i, (c, s) in enumerate(zip(self.configs, self.scores))
            ],
        }


def grid_search(train, dev, grid: Sequence[RegressionConfig], merge_train_dev: bool = True) -> GridResult:
    """Fit each config on ``train``, score dev Pearson, refit the winner.

    ``train`` and ``dev`` are ``(X, y)`` pairs.  Configs whose dev
    predictions have zero variance score -inf and are flagged.  The first
    config in grid order wins ties.
    """
    if not grid:
        raise ValueError("empty grid")
    Xtr, ytr = train
    Xdev, ydev = dev
    scores, flagged = [], []
    for idx, cfg in enumerate(grid):
        model = cfg.fit(Xtr, ytr)
        try:
            s = pearson(ydev, predict(model, Xdev))
        except UndefinedCorrelationError:
            s = -math.inf
            flagged.append(idx)
        scores.append(s)
    best = 0
    for idx, s in enumerate(scores):
        if s > scores[best]:
            best = idx
    cfg = grid[best]
    if merge_train_dev:
        final = cfg.fit(np.vstack([Xtr, Xdev]), np.concatenate([np.ravel(ytr), np.ravel(ydev)]))
    else:
        final = cfg.fit(Xtr, ytr)
    return GridResult(scores, flagged, best, cfg, final, list(grid))


def ensemble_average(predictions: Sequence) -> np.ndarray:
    if len(predictions) == 0:
        raise ValueError("need at least one prediction vector")
    arrs = [np.asarray(p, dtype=np.float64).ravel() for p in predictions]
    n = arrs[0].shape[0]
    if any(a.shape[0] != n for a in arrs):
        raise ValueError("prediction vectors differ in length")
    return np.mean(np.vstack(arrs), axis=0)


def greedy_ensemble_select(candidates: Mapping[str, Sequence[float]], dev_labels) -> list[str]:
    """Forward selection of prediction sets by dev Pearson of their average.

    Starts empty and keeps adding the candidate that most improves the
    score, stopping at the first step without a strict improvement.  Equal
    scores go to the alphabetically first name.
    """
    if not candidates:
        raise ValueError("need at least one candidate")
    names = sorted(candidates)
    preds = {n: np.asarray(candidates[n], dtype=np.float64).ravel() for n in names}
    selected: list[str] = []
    total = None
    current = -math.inf
    while True:
        best_name, best_score = None, current
        for name in names:
            if name in selected:
                continue
            summed = preds[name] if total is None else total + preds[name]
            try:
                s = pearson(dev_labels, summed / (len(selected) + 1))
            except UndefinedCorrelationError:
                continue
            if s > best_score:
                best_name, best_score = name, s
        if best_name is None:
            return selected
        selected.append(best_name)
        total = preds[best_name].copy() if total is None else total + preds[best_name]
        current = best_score
