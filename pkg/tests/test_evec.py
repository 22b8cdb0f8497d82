import math

import numpy as np
import pytest
from sklearn.feature_extraction.text import CountVectorizer
from sklearn.linear_model import LogisticRegression

from affectkit import dataio, evec
from affectkit.evec import EvecConfig
from affectkit.synthetic import make_evec_corpus

from oracles import central_diff

SMALL = EvecConfig(emb_dim=5, filter_widths=(2, 3), filters_per_width=3, seed=1)


def small_model(vocab=("a", "b", "c", "d", "e", "f"), config=SMALL):
    return evec.init_model(list(vocab), config)


def split(docs):
    return [(text.split(), label) for label, text in docs]


@pytest.fixture(scope="module")
def corpus():
    return split(make_evec_corpus(200, seed=3)), split(make_evec_corpus(100, seed=4))


@pytest.fixture(scope="module")
def trained(corpus):
    train, dev = corpus
    log = evec.TrainLog()
    cfg = EvecConfig(emb_dim=32, filters_per_width=16, epochs=10, seed=0)
    return evec.train_evec(train, dev, cfg, log), log, cfg


def test_probabilities_sum_to_one(rng):
    m = small_model()
    for _ in range(100):
        seq = rng.integers(0, 7, size=int(rng.integers(0, 12)))
        probs, pooled = evec.forward(m, seq)
        assert abs(probs.sum() - 1.0) <= 1e-9 and pooled.shape == (6,)


def test_fresh_model_near_uniform(rng):
    cfg = EvecConfig(seed=0)
    m = evec.init_model([f"w{i}" for i in range(50)], cfg)
    data = [(rng.integers(1, 51, size=10), c) for c in cfg.classes for _ in range(5)]
    assert abs(evec.mean_loss(m, data) - math.log(4)) <= 0.15


def test_all_padding_pools_bias():
    m = small_model()
    _, pooled = evec.forward(m, [0, 0, 0, 0])
    expected = np.concatenate([np.tanh(m.params[f"conv{w}.b"]) for w in m.widths])
    np.testing.assert_array_equal(pooled, expected)


def test_short_sequence_padded_and_range_checked():
    m = small_model()
    assert evec.forward(m, [1])[0].shape == (4,)
    with pytest.raises(IndexError):
        evec.forward(m, [1, 99])
    with pytest.raises(IndexError):
        evec.forward(m, [-1])


def test_encode_oov_is_padding():
    m = small_model()
    assert m.encode(["a", "zzz"]).tolist() == [1, 0]


@pytest.mark.parametrize("l2", [0.0, 0.01])
def test_gradient_check(l2):
    m = small_model()
    batch = [(np.array([1, 2, 3, 4, 2]), "joy"), (np.array([5, 6, 1]), "fear")]
    _, grads = evec.loss_and_gradients(m, batch, l2)
    for name, param in m.params.items():
        num = central_diff(lambda: evec.loss_and_gradients(m, batch, l2)[0], param, 1e-4)
        if name == "E":
            num[evec.PAD] = 0.0
        err = np.abs(grads[name] - num) / np.maximum(1.0, np.abs(num))
        assert err.max() <= 1e-3, name
    assert not grads["E"][evec.PAD].any()


def test_zero_l2_loss_is_cross_entropy():
    m = small_model()
    batch = [(np.array([1, 2, 3]), "anger"), (np.array([4, 5]), "sadness")]
    loss, _ = evec.loss_and_gradients(m, batch, 0.0)
    probs = [evec.forward(m, s)[0][m.classes.index(y)] for s, y in batch]
    assert loss == pytest.approx(-np.mean(np.log(probs)), rel=1e-12)


def test_duplicated_batch_same_gradient():
    m = small_model()
    batch = [(np.array([1, 2, 3]), "anger"), (np.array([4, 5, 6, 1]), "joy")]
    _, g1 = evec.loss_and_gradients(m, batch)
    _, g2 = evec.loss_and_gradients(m, batch + batch)
    for k in g1:
        np.testing.assert_allclose(g1[k], g2[k], atol=1e-14)


def test_empty_batch():
    with pytest.raises(ValueError):
        evec.loss_and_gradients(small_model(), [])


def test_max_pool_ignores_non_argmax_positions():
    cfg = EvecConfig(emb_dim=4, filter_widths=(2,), filters_per_width=1, seed=5)
    vocab = [f"t{i}" for i in range(10)]
    m = evec.init_model(vocab, cfg)
    seq = np.arange(1, 11)
    W, b = m.params["conv2.W"][0], m.params["conv2.b"][0]
    E = m.params["E"]
    pre = np.array([W @ E[seq[t:t + 2]].ravel() + b for t in range(len(seq) - 1)])
    best = int(np.argmax(pre))
    outside = [t for t in range(len(seq)) if t not in (best, best + 1)]
    _, base = evec.forward(m, seq)
    for pos in outside:
        for h in (1e-4, -1e-4):
            saved = E[seq[pos]].copy()
            E[seq[pos]] += h
            _, pooled = evec.forward(m, seq)
            E[seq[pos]] = saved
            np.testing.assert_array_equal(pooled, base)


def test_bag_of_words_oracle_separable(corpus):
    train, dev = corpus
    vec = CountVectorizer(token_pattern=r"\S+")
    Xtr = vec.fit_transform([" ".join(t) for t, _ in train])
    clf = LogisticRegression(max_iter=2000).fit(Xtr, [y for _, y in train])
    acc = clf.score(vec.transform([" ".join(t) for t, _ in dev]), [y for _, y in dev])
    assert acc >= 0.95


def test_trained_accuracy_and_padding(trained, corpus):
    model, log, _ = trained
    _, dev = corpus
    enc = [(model.encode(t), y) for t, y in dev]
    assert evec.accuracy(model, enc) >= 0.95
    assert not model.params["E"][evec.PAD].any()
    assert all(np.all(np.isfinite(p)) for p in model.params.values())
    assert log.best_epoch >= 1 and log.dev_loss[log.best_epoch - 1] == min(log.dev_loss)


def test_loss_decreases_first_five_epochs(trained):
    _, log, _ = trained
    first = log.train_loss[:5]
    assert len(first) == 5 and all(b < a for a, b in zip(first, first[1:]))


def test_cue_word_geometry(trained):
    model, _, _ = trained
    table = evec.export_vectors(model)

    def cos(a, b):
        u, v = table[a], table[b]
        return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))

    assert cos("grr", "growl") > cos("grr", "yay") + 0.2


def test_deterministic_export(trained, corpus, tmp_path):
    model, _, cfg = trained
    train, dev = corpus
    again = evec.train_evec(train, dev, cfg)
    dataio.write_word_vectors(evec.export_vectors(model), tmp_path / "a.txt")
    dataio.write_word_vectors(evec.export_vectors(again), tmp_path / "b.txt")
    assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()


def test_export_shape(trained):
    model, _, _ = trained
    table = evec.export_vectors(model)
    assert len(table) == len(model.vocab) and table.dim == 32
    assert set(table.tokens) == set(model.vocab)
    default = evec.export_vectors(evec.init_model(["x", "y"], EvecConfig()))
    assert default.dim == 300 and len(default) == 2


def test_class_errors():
    with pytest.raises(ValueError, match="absent"):
        evec.train_evec([(["a"], "joy"), (["b"], "joy")], [], EvecConfig(epochs=1))
    with pytest.raises(ValueError):
        evec.train_evec([(["a"], "surprise")], [], EvecConfig(epochs=1))
    with pytest.raises(ValueError):
        EvecConfig(classes=("joy",))


def test_early_stopping_patience(corpus):
    train, dev = corpus
    log = evec.TrainLog()
    cfg = EvecConfig(emb_dim=8, filters_per_width=4, filter_widths=(2,), epochs=40, patience=1, lr=2.0)
    evec.train_evec(train[:60], dev[:30], cfg, log)
    assert len(log.dev_loss) < 40 or log.best_epoch == 40
    if len(log.dev_loss) < 40:
        assert log.dev_loss[-1] >= min(log.dev_loss)
