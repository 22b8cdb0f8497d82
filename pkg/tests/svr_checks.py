"""KKT conditions for a fitted epsilon-SVR, shared by unit and acceptance tests."""
import numpy as np

from affectkit import regress


def full_coefficients(model, X):
    """Dual coefficient for every training row (0 for rows that were dropped)."""
    coef = np.zeros(X.shape[0])
    for k, row in enumerate(model.support_inputs):
        hits = np.flatnonzero(np.all(X == row, axis=1))
        coef[hits[0]] = model.dual_coeffs[k]
    return coef


def kkt_report(model, X, y, C, eps, tol=regress.SVR_TOL):
    coef = full_coefficients(model, X)
    resid = y - regress.predict(model, X)
    inside = np.abs(resid) < eps - 2 * tol
    outside_hi = resid > eps + 2 * tol
    outside_lo = resid < -eps - 2 * tol
    free = (np.abs(coef) > 1e-9) & (np.abs(coef) < C - 1e-9)
    return {
        "bounds": bool(np.all(np.abs(coef) <= C + 1e-9)),
        "sum": float(abs(coef.sum())),
        "inside_zero": bool(np.all(np.abs(coef[inside]) <= 1e-6)),
        "outside_at_bound": bool(np.all(np.abs(coef[outside_hi] - C) <= 1e-6)
                                 and np.all(np.abs(coef[outside_lo] + C) <= 1e-6)),
        "sign": bool(np.all(coef[resid > eps + 2 * tol] >= 0) and np.all(coef[resid < -eps - 2 * tol] <= 0)),
        "free_on_tube": bool(np.all(np.abs(np.abs(resid[free]) - eps) <= 2 * tol)),
        "n_sv": int(np.count_nonzero(coef)),
    }
