"""Independent reference implementations used as test oracles."""
from fractions import Fraction
from itertools import combinations

import numpy as np

# frequency table for segmentation checks; total deliberately larger than the sum
SEG_FREQ = {"i": 100, "love": 50, "you": 80, "lo": 3, "ve": 2, "sun": 20, "shine": 15,
            "sunshine": 4, "a": 60, "an": 30, "nd": 1, "and": 45, "go": 25, "od": 2,
            "good": 40, "day": 35, "to": 70, "today": 12, "no": 22, "not": 18, "e": 5}
SEG_TOTAL = 1000
SEG_WORDS = ["iloveyou", "love", "zq", "sunshine", "goodday", "todaygood", "andiloveyou",
             "notgoodtoday", "ilovesunday", "iiii", "aaaaaaaaaaaa", "xyzgoodxyz", "a", "nde",
             "gooday", "youandi", "shinesun", "loveve"]


def brute_force_segment(word, counts, total):
    """Enumerate every split; best probability, then fewer pieces, then lexicographic."""
    def prob(w):
        if w in counts:
            return Fraction(counts[w], total)
        return Fraction(10, total * 1000 ** len(w))

    n = len(word)
    best = None
    for k in range(n):
        for cuts in combinations(range(1, n), k):
            bounds = (0, *cuts, n)
            pieces = tuple(word[a:b] for a, b in zip(bounds, bounds[1:]))
            if max(len(p) for p in pieces) > 24:
                continue
            score = Fraction(1)
            for p in pieces:
                score *= prob(p)
            key = (-score, len(pieces), pieces)
            if best is None or key < best:
                best = key
    return list(best[2]), -best[0]


def primal_ridge_predict(X, y, lam, Xq):
    """Ridge without intercept: w = (X^T X + lam I)^-1 X^T y."""
    w = np.linalg.solve(X.T @ X + lam * np.eye(X.shape[1]), X.T @ y)
    return Xq @ w


def least_squares(X, Y):
    W, *_ = np.linalg.lstsq(X, Y, rcond=None)
    return W.T


def central_diff(f, x, h):
    """Gradient of scalar f at array x by central differences (x is modified in place)."""
    g = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        old = x[idx]
        x[idx] = old + h
        fp = f()
        x[idx] = old - h
        fm = f()
        x[idx] = old
        g[idx] = (fp - fm) / (2 * h)
    return g


def pearson_formula(a, b):
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    n = len(a)
    ma, mb = sum(a) / n, sum(b) / n
    cov = sum((x - ma) * (y - mb) for x, y in zip(a, b))
    va = sum((x - ma) ** 2 for x in a)
    vb = sum((y - mb) ** 2 for y in b)
    return cov / (va * vb) ** 0.5


def skewed_scope_pairs(n=400, seed=0, cuts=(0.6, 0.75, 0.88), jitter=0.03):
    """(reg label, ordinal) pairs whose class 0 spans roughly [0, 0.6].

    Ordinals come from the skewed cuts applied to a jittered copy of the
    label, so adjacent classes overlap a little.
    """
    rng = np.random.default_rng(seed)
    reg = rng.uniform(0, 1, n)
    noisy = reg + rng.normal(0, jitter, n)
    ords = np.searchsorted(cuts, noisy, side="right")
    return [(float(r), int(o)) for r, o in zip(reg, ords)]
