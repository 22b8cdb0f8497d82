import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from hypothesis.extra import numpy as hnp
from scipy.stats import pearsonr

from affectkit import evaluation as ev
from affectkit.errors import MissingIdError, UndefinedCorrelationError

from oracles import pearson_formula


def test_pearson_examples():
    assert ev.pearson([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)
    assert ev.pearson([1, 2, 3], [-1, -2, -3]) == pytest.approx(-1.0)
    assert ev.pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(pearson_formula([1, 2, 3], [1, 2, 4]), abs=1e-12)
    assert abs(ev.pearson([1, 2, 3], [1, 2, 4]) - 0.9820) <= 1e-4


def test_pearson_zero_variance():
    with pytest.raises(UndefinedCorrelationError):
        ev.pearson([1, 1, 1], [1, 2, 3])


vec = hnp.arrays(np.float64, st.integers(3, 20), elements=st.floats(-100, 100))


@given(vec, st.floats(0.1, 10), st.floats(-5, 5))
def test_pearson_affine(a, c, d):
    assume(np.ptp(a) > 1e-3)
    assert ev.pearson(a, c * a + d) == pytest.approx(1.0, abs=1e-9)
    assert ev.pearson(a, -c * a + d) == pytest.approx(-1.0, abs=1e-9)


@given(vec, st.data())
def test_pearson_matches_scipy(a, data):
    b = data.draw(hnp.arrays(np.float64, a.shape, elements=st.floats(-100, 100)))
    assume(np.ptp(a) > 1e-3 and np.ptp(b) > 1e-3)
    assert ev.pearson(a, b) == pytest.approx(pearsonr(a, b)[0], abs=1e-9)


def test_jaccard_examples():
    G = np.array([[1, 1, 0], [0, 1, 0]])
    assert ev.jaccard_multilabel(G, G) == 1.0
    assert ev.jaccard_multilabel([[1, 0]], [[0, 1]]) == 0.0
    assert ev.jaccard_multilabel([[0, 1, 1, 0]], [[0, 0, 1, 1]]) == 1 / 3
    assert ev.jaccard_multilabel([[0, 0]], [[0, 0]]) == 1.0
    with pytest.raises(ValueError):
        ev.jaccard_multilabel([[0, 1]], [[0, 1, 0]])


bits = hnp.arrays(np.int64, st.tuples(st.integers(1, 6), st.integers(1, 5)), elements=st.integers(0, 1))


@given(bits, st.data())
def test_jaccard_one_iff_exact(G, data):
    P = data.draw(hnp.arrays(np.int64, G.shape, elements=st.integers(0, 1)))
    assert (ev.jaccard_multilabel(G, P) == 1.0) == bool(np.array_equal(G, P))


@given(bits, st.data())
def test_jaccard_monotone_on_flipping_correct_bit(G, data):
    P = data.draw(hnp.arrays(np.int64, G.shape, elements=st.integers(0, 1)))
    correct = np.argwhere(P == G)
    assume(len(correct))
    r, c = correct[data.draw(st.integers(0, len(correct) - 1))]
    assume((G[r] | P[r]).any())
    Q = P.copy()
    Q[r, c] ^= 1
    assert ev.jaccard_multilabel(G, Q) <= ev.jaccard_multilabel(G, P)


def test_macro_average():
    assert ev.macro_average([.792, .709, .763, .732]) == 0.749
    assert ev.macro_average([0.3]) == 0.3
    with pytest.raises(ValueError):
        ev.macro_average([])


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=8), st.randoms())
def test_macro_permutation_invariant(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert ev.macro_average(values) == ev.macro_average(shuffled)


def _pairs(n=20):
    return [ev.BiasPair(f"a{i}", f"b{i}", "gender" if i % 2 else "race", "anger") for i in range(n)]


def test_bias_audit_examples(rng):
    pairs = _pairs()
    base = {f"b{i}": float(v) for i, v in enumerate(rng.uniform(0.1, 0.9, 20))}
    same = {**base, **{f"a{i}": base[f"b{i}"] for i in range(20)}}
    for v in ev.bias_audit(same, pairs).values():
        assert v["percent"] == 0.0
    shifted = {**base, **{f"a{i}": base[f"b{i}"] + 0.005 for i in range(20)}}
    for v in ev.bias_audit(shifted, pairs).values():
        assert abs(v["percent"] - 0.5) <= 1e-9
        assert v["n_pairs"] == 10


@given(st.lists(st.floats(0, 1), min_size=4, max_size=4))
def test_bias_antisymmetric(scores):
    preds = dict(zip(["a0", "b0", "a1", "b1"], scores))
    pairs = _pairs(2)
    swapped = [p._replace(id_a=p.id_b, id_b=p.id_a) for p in pairs]
    fwd, back = ev.bias_audit(preds, pairs), ev.bias_audit(preds, swapped)
    for key in fwd:
        assert fwd[key]["mean_diff"] == -back[key]["mean_diff"]


def test_bias_missing_id():
    with pytest.raises(MissingIdError, match="b0"):
        ev.bias_audit({"a0": 0.5}, _pairs(1))


def test_bias_pairs_file(tmp_path):
    pairs = _pairs(3)
    ev.write_bias_pairs(pairs, tmp_path / "p.tsv")
    assert ev.read_bias_pairs(tmp_path / "p.tsv") == pairs
    (tmp_path / "bad.tsv").write_text("x\tx\tgender\tjoy\n")
    with pytest.raises(ValueError):
        ev.read_bias_pairs(tmp_path / "bad.tsv")


def test_reports():
    rep = ev.regression_report({"a": ("joy", 0.1), "b": ("joy", 0.5), "c": ("joy", 0.9)},
                               {"a": 0.2, "b": 0.4, "c": 0.95})
    assert set(rep.per_emotion) == {"joy"} and rep.macro == rep.per_emotion["joy"]
    assert "joy=" in rep.to_text() and '"n_samples": 3' in rep.to_json()
    text = ev.bias_report_text(ev.bias_audit({"a0": 0.6, "b0": 0.5}, _pairs(1)))
    assert "+10.00%" in text
