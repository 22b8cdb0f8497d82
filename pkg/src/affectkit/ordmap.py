"""Mapping regression outputs in [0,1] to ordinal classes.

Three mappers are supported:

naive
    equal-width segments over the label range, one per ordinal.
scope
    segment boundaries estimated from the training labels of each ordinal
    class; overlapping adjacent classes are cut where the fewest training
    pairs are misclassified.
poly
    a least-squares polynomial from regression label to ordinal, rounded to
    the nearest ordinal.
"""
from __future__ import annotations

import bisect
import math
from typing import Iterable, Sequence

import numpy as np

from .dataio import array_from_payload, array_payload
from .errors import NumericalError, UndefinedCorrelationError
from .evaluation import pearson

METHODS = ("naive", "scope", "poly")
POLY_COND_LIMIT = 1e12


class OrdinalMapper:
    model_kind = "ordmap"

    def __init__(self, variant, ordinals, *, lo=0.0, hi=1.0, thresholds=None, coeffs=None):
        if variant not in METHODS:
            raise ValueError(f"unknown mapping {variant!r}")
        self.variant = variant
        self.ordinals = tuple(int(o) for o in ordinals)
        if list(self.ordinals) != sorted(set(self.ordinals)) or len(self.ordinals) < 2:
            raise ValueError("ordinals must be >= 2 strictly ascending integers")
        self.lo, self.hi = float(lo), float(hi)
        self.thresholds = None if thresholds is None else np.asarray(thresholds, dtype=np.float64)
        self.coeffs = None if coeffs is None else np.asarray(coeffs, dtype=np.float64)
        if variant == "naive" and not self.hi > self.lo:
            raise ValueError("naive range must have hi > lo")
        if variant == "scope":
            t = self.thresholds
            if t is None or t.shape != (len(self.ordinals) - 1,):
                raise ValueError("scope mapper needs len(ordinals) - 1 thresholds")
            if np.any(np.diff(t) <= 0):
                raise ValueError("scope thresholds must be strictly ascending")
        if variant == "poly" and (self.coeffs is None or self.coeffs.ndim != 1 or self.coeffs.size < 2):
            raise ValueError("poly mapper needs a coefficient vector")

    def __repr__(self):
        extra = {"naive": f"range=({self.lo}, {self.hi})",
                 "scope": f"thresholds={self.thresholds.tolist() if self.thresholds is not None else None}",
                 "poly": f"coeffs={self.coeffs.tolist() if self.coeffs is not None else None}"}
        return f"OrdinalMapper({self.variant}, ordinals={list(self.ordinals)}, {extra[self.variant]})"

    def polynomial(self, x):
        """Evaluate the fitted polynomial (coefficients in increasing power)."""
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=np.float64), self.coeffs)

    def segment_index(self, pred: float) -> int:
        k = len(self.ordinals)
        if self.variant == "naive":
            if not math.isfinite(pred):
                return 0 if pred < 0 else k - 1
            idx = math.floor((pred - self.lo) / (self.hi - self.lo) * k)
            return min(max(idx, 0), k - 1)
        return bisect.bisect_right(self.thresholds.tolist(), pred)

    def apply(self, pred):
        """Ordinal for one prediction, or an int array for an array of them."""
        if np.ndim(pred) > 0:
            return np.array([self.apply(float(p)) for p in np.ravel(pred)], dtype=np.int64)
        pred = float(pred)
        if self.variant in ("naive", "scope"):
            return self.ordinals[self.segment_index(pred)]
        value = float(self.polynomial(pred))
        rounded = math.copysign(math.floor(abs(value) + 0.5), value)
        lo, hi = self.ordinals[0], self.ordinals[-1]
        rounded = min(max(rounded, lo), hi)
        # snap to the ordinal set (matters only for non-consecutive ordinals)
        return min(self.ordinals, key=lambda o: (abs(o - rounded), o))

    def predict(self, X):
        return self.apply(np.asarray(X, dtype=np.float64))

    def to_payload(self):
        p = {"kind": "ordmap", "variant": self.variant, "ordinals": list(self.ordinals),
             "lo": self.lo, "hi": self.hi}
        if self.thresholds is not None:
            p["thresholds"] = array_payload(self.thresholds)
        if self.coeffs is not None:
            p["coeffs"] = array_payload(self.coeffs)
        return p

    @classmethod
    def from_payload(cls, p):
        return cls(
            p["variant"], p["ordinals"], lo=p["lo"], hi=p["hi"],
            thresholds=array_from_payload(p["thresholds"]) if "thresholds" in p else None,
            coeffs=array_from_payload(p["coeffs"]) if "coeffs" in p else None,
        )


def apply(mapper: OrdinalMapper, pred):
    return mapper.apply(pred)


def _split_pairs(pairs):
    pairs = list(pairs)
    reg = np.array([float(r) for r, _ in pairs], dtype=np.float64)
    ords = np.array([int(o) for _, o in pairs], dtype=np.int64)
    return reg, ords


def fit_naive(ordinals: Sequence[int], range=(0.0, 1.0)) -> OrdinalMapper:
    return OrdinalMapper("naive", sorted(ordinals), lo=range[0], hi=range[1])


def _best_cut(lower: np.ndarray, upper: np.ndarray) -> float:
    """Cut between two classes minimizing misclassified pairs; ties -> smallest cut."""
    values = np.unique(np.concatenate([lower, upper]))
    if len(values) == 1:
        return float(values[0])
    cuts = (values[:-1] + values[1:]) / 2
    lower_sorted = np.sort(lower)
    upper_sorted = np.sort(upper)
    # lower-class values >= cut and upper-class values < cut are errors
    errs = (len(lower_sorted) - np.searchsorted(lower_sorted, cuts, side="left")) \
        + np.searchsorted(upper_sorted, cuts, side="left")
    return float(cuts[int(np.argmin(errs))])


def fit_scope(pairs: Iterable[tuple[float, int]], ordinals: Sequence[int] | None = None) -> OrdinalMapper:
    """Estimate class boundaries from (regression label, ordinal label) pairs.

    Separated neighbours are cut at the midpoint of their gap.  Overlapping
    neighbours are cut at the midpoint between consecutive observed values
    that misclassifies the fewest of their training pairs.
    """
    reg, ords = _split_pairs(pairs)
    present = sorted(set(ords.tolist()))
    ordinals = present if ordinals is None else sorted(int(o) for o in ordinals)
    missing = sorted(set(ordinals) - set(present))
    if missing:
        raise ValueError(f"ordinal classes missing from training pairs: {missing}")
    extra = sorted(set(present) - set(ordinals))
    if extra:
        raise ValueError(f"training pairs contain unexpected ordinals: {extra}")
    if len(ordinals) < 2:
        raise ValueError("scope mapping needs at least 2 ordinal classes")
    thresholds = []
    for k, k1 in zip(ordinals[:-1], ordinals[1:]):
        lower, upper = reg[ords == k], reg[ords == k1]
        if lower.max() < upper.min():
            cut = (lower.max() + upper.min()) / 2
        else:
            cut = _best_cut(lower, upper)
        if thresholds and cut <= thresholds[-1]:
            # heavily overlapping classes can produce crossing cuts; keep the
            # segment for this class non-empty but as narrow as possible
            cut = float(np.nextafter(thresholds[-1], np.inf))
        thresholds.append(float(cut))
    return OrdinalMapper("scope", ordinals, thresholds=thresholds)


def fit_poly(pairs: Iterable[tuple[float, int]], degree: int = 3,
             ordinals: Sequence[int] | None = None) -> OrdinalMapper:
    """Least-squares polynomial from regression label to ordinal.

    Solved with the normal equations of a column-scaled Vandermonde matrix.
    """
    reg, ords = _split_pairs(pairs)
    if len(reg) < 5:
        raise ValueError(f"polynomial mapping needs at least 5 pairs, got {len(reg)}")
    if len(np.unique(reg)) < 2:
        raise ValueError("polynomial mapping needs at least 2 distinct regression values")
    V = np.vander(reg, degree + 1, increasing=True)
    scale = np.linalg.norm(V, axis=0)
    scale[scale == 0] = 1.0
    Vs = V / scale
    G = Vs.T @ Vs
    if np.linalg.cond(G) > POLY_COND_LIMIT:
        raise NumericalError(
            f"degree-{degree} fit is rank deficient for {len(np.unique(reg))} distinct values"
        )
    coeffs = np.linalg.solve(G, Vs.T @ ords.astype(np.float64)) / scale
    if ordinals is None:
        ordinals = sorted(set(ords.tolist()))
        if len(ordinals) < 2:
            ordinals = [ordinals[0], ordinals[0] + 1]
    return OrdinalMapper("poly", sorted(ordinals), coeffs=coeffs)


def fit_mapper(method: str, pairs, ordinals: Sequence[int]) -> OrdinalMapper:
    pairs = list(pairs)
    if method == "naive":
        return fit_naive(ordinals)
    if method == "scope":
        return fit_scope(pairs, ordinals)
    if method == "poly":
        return fit_poly(pairs, ordinals=ordinals)
    raise ValueError(f"unknown mapping {method!r}")


def is_monotone(mapper: OrdinalMapper, n_grid: int = 1001) -> bool:
    """True when the mapper's underlying function does not decrease on [0,1]."""
    if mapper.variant != "poly":
        return True
    x = np.linspace(0.0, 1.0, n_grid)
    deriv = np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(mapper.coeffs))
    return bool(np.all(deriv >= -1e-12))


def accuracy(mapper: OrdinalMapper, reg, ords) -> float:
    return float(np.mean(mapper.apply(np.asarray(reg)) == np.asarray(ords)))


def score_mapping(mapper: OrdinalMapper, preds, gold_ords) -> float:
    """Dev Pearson between mapped predictions and gold ordinals (-inf if undefined)."""
    try:
        return pearson(gold_ords, mapper.apply(np.asarray(preds, dtype=np.float64)))
    except UndefinedCorrelationError:
        return -math.inf


def select_mapper(train_pairs, dev_preds, dev_ords, ordinals, methods=METHODS):
    """Fit each mapping on training pairs and keep the best by dev Pearson.

    Returns ``(mapper, {method: score})``; ties go to the earlier method.
    """
    train_pairs = list(train_pairs)
    scores, best = {}, None
    for method in methods:
        mapper = fit_mapper(method, train_pairs, ordinals)
        scores[method] = score_mapping(mapper, dev_preds, dev_ords)
        if best is None or scores[method] > scores[best[0]]:
            best = (method, mapper)
    return best[1], scores


def select_joint(train_pairs, dev_candidates: dict, dev_ords, ordinals, methods=METHODS):
    """Search (prediction set, mapping) pairs jointly on the dev set.

    ``dev_candidates`` maps a name to its dev predictions.  Returns
    ``(name, mapper, {(name, method): score})``.
    """
    train_pairs = list(train_pairs)
    mappers = {m: fit_mapper(m, train_pairs, ordinals) for m in methods}
    scores, best = {}, None
    for name in dev_candidates:
        for method in methods:
            s = score_mapping(mappers[method], dev_candidates[name], dev_ords)
            scores[(name, method)] = s
            if best is None or s > scores[best]:
                best = (name, method)
    return best[0], mappers[best[1]], scores
