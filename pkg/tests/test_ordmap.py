import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from affectkit import ordmap
from affectkit.errors import NumericalError
from affectkit.ordmap import OrdinalMapper

from oracles import skewed_scope_pairs

EMO = [0, 1, 2, 3]
VAL = [-3, -2, -1, 0, 1, 2, 3]


def test_naive_examples():
    m = ordmap.fit_naive(EMO)
    assert m.apply(0.30) == 1
    assert m.apply(1.0) == 3
    assert m.apply(1.7) == 3
    assert m.apply(-0.5) == 0
    assert ordmap.fit_naive(VAL).apply(0.50) == 0


def test_naive_segment_edges():
    m = ordmap.fit_naive(EMO)
    assert [m.apply(x) for x in (0.0, 0.2499, 0.25, 0.5, 0.75)] == [0, 0, 1, 2, 3]


def test_scope_separated_midpoint():
    m = ordmap.fit_scope([(0.1, 0), (0.2, 0), (0.6, 1), (0.8, 1)])
    assert m.thresholds.tolist() == pytest.approx([0.4])


def _errors(cut, pairs):
    return sum((r >= cut) != (o == 1) for r, o in pairs)


def test_scope_overlap_minimizes_errors():
    pairs = [(0.1, 0), (0.5, 0), (0.4, 1), (0.9, 1)]
    m = ordmap.fit_scope(pairs)
    values = sorted(r for r, _ in pairs)
    candidates = [(a + b) / 2 for a, b in zip(values, values[1:])]
    best = min(_errors(c, pairs) for c in candidates)
    assert best == 1 and _errors(m.thresholds[0], pairs) == 1
    assert m.thresholds[0] == min(c for c in candidates if _errors(c, pairs) == best)


def test_scope_fear_skew():
    m = ordmap.fit_scope(skewed_scope_pairs(seed=3), EMO)
    assert m.thresholds[0] > 0.5


def test_scope_missing_class():
    with pytest.raises(ValueError, match=r"\[2, 3\]"):
        ordmap.fit_scope([(0.1, 0), (0.5, 1)], EMO)


def test_scope_thresholds_strictly_ascending_under_heavy_overlap(rng):
    pairs = [(float(r), int(o)) for r, o in zip(rng.uniform(size=60), rng.integers(0, 4, 60))]
    t = ordmap.fit_scope(pairs, EMO).thresholds
    assert np.all(np.diff(t) > 0) and len(t) == 3


def test_scope_clamp():
    m = OrdinalMapper("scope", [0, 1], thresholds=[0.4])
    assert m.apply(-0.2) == 0 and m.apply(5.0) == 1


def test_poly_recovers_exact_cubic():
    # x = cbrt(k/3) makes 3x^3 hit every ordinal exactly
    x = np.cbrt(np.array([0, 1, 2, 3, 0, 1, 2, 3, 1]) / 3)
    pairs = [(float(v), int(round(3 * v ** 3))) for v in x]
    m = ordmap.fit_poly(pairs, ordinals=EMO)
    np.testing.assert_allclose(m.coeffs, [0, 0, 0, 3], atol=1e-8)


def test_poly_constant_data():
    pairs = [(float(x), 2) for x in np.linspace(0.1, 0.9, 10)]
    m = ordmap.fit_poly(pairs, ordinals=EMO)
    assert all(m.apply(x) == 2 for x in np.linspace(-0.5, 1.5, 21))


def test_poly_preconditions():
    with pytest.raises(ValueError, match="5 pairs"):
        ordmap.fit_poly([(0.1, 0), (0.2, 1), (0.3, 1), (0.4, 2)])
    with pytest.raises(ValueError):
        ordmap.fit_poly([(0.5, 0)] * 6)
    with pytest.raises(NumericalError):
        ordmap.fit_poly([(0.2, 0)] * 3 + [(0.8, 1)] * 3)


def test_poly_rounding_half_away_and_clamp():
    m = OrdinalMapper("poly", VAL, coeffs=[-3.0, 6.0])
    assert m.apply(0.75) == 2
    assert m.apply(0.25) == -2
    assert m.apply(2.0) == 3 and m.apply(-1.0) == -3


@given(st.lists(st.floats(-2, 2), min_size=2, max_size=30))
def test_naive_scope_monotone(xs):
    xs = sorted(xs)
    for m in (ordmap.fit_naive(EMO), OrdinalMapper("scope", EMO, thresholds=[0.3, 0.5, 0.9])):
        out = m.apply(np.array(xs))
        assert np.all(np.diff(out) >= 0)


def test_poly_monotone_when_cubic_is():
    pairs = skewed_scope_pairs(seed=1)
    m = ordmap.fit_poly(pairs, ordinals=EMO)
    if ordmap.is_monotone(m):
        out = m.apply(np.linspace(0, 1, 501))
        assert np.all(np.diff(out) >= 0)
    bumpy = OrdinalMapper("poly", EMO, coeffs=[0, 10, -30, 20])
    assert not ordmap.is_monotone(bumpy)


@pytest.mark.parametrize("seed", range(5))
def test_scope_beats_naive_on_training(seed):
    pairs = skewed_scope_pairs(seed=seed)
    reg, ords = zip(*pairs)
    acc = {m: ordmap.accuracy(ordmap.fit_mapper(m, pairs, EMO), reg, ords) for m in ordmap.METHODS}
    assert acc["scope"] >= acc["naive"]


@pytest.mark.parametrize("thresholds", [(0.2, 0.5, 0.7), (0.6, 0.75, 0.88), (0.1, 0.15, 0.95)])
def test_scope_refit_recovers_assignments(thresholds):
    truth = OrdinalMapper("scope", EMO, thresholds=thresholds)
    reg = np.linspace(0, 1, 200)
    pairs = list(zip(reg, truth.apply(reg)))
    refit = ordmap.fit_scope(pairs, EMO)
    assert np.array_equal(refit.apply(reg), truth.apply(reg))


def test_select_mapper_auto():
    pairs = skewed_scope_pairs(seed=7)
    dev = skewed_scope_pairs(n=200, seed=8)
    preds, gold = zip(*dev)
    mapper, scores = ordmap.select_mapper(pairs, np.array(preds), np.array(gold), EMO)
    assert set(scores) == set(ordmap.METHODS)
    assert scores[mapper.variant] == max(scores.values())
    assert scores["scope"] > scores["naive"]


def test_select_joint():
    pairs = skewed_scope_pairs(seed=7)
    dev = skewed_scope_pairs(n=200, seed=8)
    preds, gold = map(np.array, zip(*dev))
    rng = np.random.default_rng(0)
    cands = {"good": preds, "noisy": preds + rng.normal(0, 0.3, len(preds))}
    name, mapper, scores = ordmap.select_joint(pairs, cands, gold, EMO)
    assert name == "good"
    assert len(scores) == 6 and scores[(name, mapper.variant)] == max(scores.values())


def test_mapper_validation():
    with pytest.raises(ValueError):
        OrdinalMapper("scope", EMO, thresholds=[0.5, 0.4, 0.9])
    with pytest.raises(ValueError):
        OrdinalMapper("naive", [1])
