"""Deterministic synthetic datasets for tests and the shipped demo pipeline.

Run ``python -m affectkit.synthetic OUTDIR`` to regenerate the fixture
files.  Every generator takes a seed and is reproducible.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from . import dataio
from .dataio import LabeledInstance, SentenceFeatureMatrix

EVEC_CLASSES = ("joy", "sadness", "anger", "fear")
CUE_WORDS = {
    "joy": ("yay", "woohoo", "sunshine"),
    "sadness": ("sob", "sigh", "gloomy"),
    "anger": ("grr", "growl", "furious"),
    "fear": ("eek", "yikes", "shiver"),
}
FILLER = (
    "the a to and of in is it you that was for on are with as i his they be at one have this "
    "from or had by word but what some we can out other were all there when up use your how "
    "said an each she which do their time if will way about many then them write would like "
    "so these her long make thing see him two has look more day could go come did number"
).split()
ML_LABELS = ("anger", "joy", "love", "optimism", "sadness")


def make_evec_corpus(n_docs=500, seed=0, classes=EVEC_CLASSES, cues=CUE_WORDS, length=(6, 12)):
    """Hashtag-style documents: filler words plus one or two class cue words."""
    rng = np.random.default_rng(seed)
    docs = []
    for k in range(n_docs):
        label = classes[k % len(classes)]
        n = int(rng.integers(length[0], length[1] + 1))
        words = list(rng.choice(FILLER, size=n))
        for _ in range(int(rng.integers(1, 3))):
            words.insert(int(rng.integers(0, len(words) + 1)), str(rng.choice(cues[label])))
        docs.append((label, " ".join(words)))
    order = rng.permutation(n_docs)
    return [docs[i] for i in order]


def intensity_function(X):
    """Smooth target in (0, 1) used for the regression fixture."""
    z = 1.2 * X[:, 0] - 0.8 * X[:, 1] + 0.6 * np.sin(2.0 * X[:, 2]) + 0.4 * X[:, 3] * X[:, 4]
    return 1.0 / (1.0 + np.exp(-z))


ORDINAL_CUTS = (0.6, 0.75, 0.88)


def make_regression_set(n=300, dim=5, seed=1, emotion="fear"):
    """Texts, sentence features and labels where intensity = f(features).

    Ordinal classes follow skewed cuts so class 0 covers [0, 0.6].
    """
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, dim))
    y = intensity_function(X)
    ords = np.searchsorted(ORDINAL_CUTS, y, side="right")
    ids, texts = [], []
    pos_words, neg_words = CUE_WORDS["joy"], CUE_WORDS[emotion if emotion in CUE_WORDS else "fear"]
    for i in range(n):
        words = list(rng.choice(FILLER, size=int(rng.integers(4, 9))))
        cue = neg_words if y[i] > 0.5 else pos_words
        words.append(str(rng.choice(cue)))
        if y[i] > 0.8:
            words.append("SO")
            words.append("scaaared")
        text = " ".join(words) + ("!" * int(y[i] * 4))
        ids.append(f"reg-{i:04d}")
        texts.append(text)
    return ids, texts, X, y, ords


def make_multilabel_set(n=300, dim=10, n_labels=5, seed=2, margin=0.3):
    """Features and labels where each label is a linear threshold of x.

    Points within ``margin`` of any decision boundary are redrawn so the
    classes are separable with room to spare.
    """
    rng = np.random.default_rng(seed)
    Wt = rng.normal(size=(n_labels, dim))
    Wt /= np.linalg.norm(Wt, axis=1, keepdims=True)
    bias = rng.uniform(-0.5, 0.8, size=n_labels)
    rows = []
    while len(rows) < n:
        x = rng.normal(size=dim)
        s = Wt @ x - bias
        if np.all(np.abs(s) >= margin):
            rows.append(x)
    X = np.array(rows)
    Y = (X @ Wt.T - bias > 0).astype(np.int64)
    ids = [f"ml-{i:04d}" for i in range(n)]
    texts = [" ".join(rng.choice(FILLER, size=6)) for _ in range(n)]
    return ids, texts, X, Y


def write_fixtures(outdir, evec_docs=500, n_reg=300, n_ml=300, dev_fraction=1 / 3):
    """Write the demo fixture set and a matching pipeline config."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)

    docs = make_evec_corpus(evec_docs)
    n_dev = int(len(docs) * 0.2)
    dataio.write_hashtag_corpus(docs[n_dev:], out / "evec_train.tsv")
    dataio.write_hashtag_corpus(docs[:n_dev], out / "evec_dev.tsv")

    ids, texts, X, y, ords = make_regression_set(n_reg)
    n_dev = int(n_reg * dev_fraction)
    split = {"train": slice(n_dev, None), "dev": slice(0, n_dev)}
    for name, sl in split.items():
        reg = [LabeledInstance(i, t, "fear", reg_label=float(v))
               for i, t, v in zip(ids[sl], texts[sl], y[sl])]
        oc = [LabeledInstance(i, t, "fear", ord_label=int(o))
              for i, t, o in zip(ids[sl], texts[sl], ords[sl])]
        dataio.write_intensity_dataset(reg, out / f"reg_{name}.tsv", "reg")
        dataio.write_intensity_dataset(oc, out / f"oc_{name}.tsv", "oc")
    dataio.write_sentence_features(SentenceFeatureMatrix(ids, X), out / "reg_sentence.tsv")

    mids, mtexts, MX, MY = make_multilabel_set(n_ml)
    n_dev = int(n_ml * dev_fraction)
    for name, sl in (("train", slice(n_dev, None)), ("dev", slice(0, n_dev))):
        inst = [LabeledInstance(i, t, multilabels=tuple(b))
                for i, t, b in zip(mids[sl], mtexts[sl], MY[sl])]
        dataio.write_multilabel_dataset(ML_LABELS, inst, out / f"ml_{name}.tsv")
    dataio.write_sentence_features(SentenceFeatureMatrix(mids, MX), out / "ml_sentence.tsv")

    # bias pairs: reuse dev regression ids, pairing neighbours
    dev_ids = ids[:n_dev]
    with open(out / "bias_pairs.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for k in range(0, len(dev_ids) - 1, 2):
            axis = "gender" if k % 4 == 0 else "race"
            fh.write(f"{dev_ids[k]}\t{dev_ids[k + 1]}\t{axis}\tfear\n")

    config = {
        "seed": 0,
        "evec": {"emb_dim": 16, "filters_per_width": 8, "filter_widths": [2, 3],
                 "epochs": 8, "batch": 16, "lr": 0.5, "patience": 3},
        "features": {"sentence": True, "evec": True, "tweet": True},
        "regression": {
            "grid": [
                {"method": "krr", "kernel": "rbf", "gamma": g, "lam": lam}
                for g in (0.005, 0.01, 0.02) for lam in (1e-2, 1e-1)
            ] + [
                {"method": "svr", "kernel": "rbf", "gamma": g, "C": 10.0, "epsilon": 0.01}
                for g in (0.005, 0.01)
            ],
            "merge_train_dev": True,
        },
        "ordmap": {"method": "auto"},
        "multilabel": {"lam": -1e-5, "lr": 0.1, "iters": 500, "chains": 10, "cc_lr": 0.5,
                       "cc_iters": 1000, "l2": 1e-3, "tune_thresholds": False,
                       "weights": [0.5, 0.5]},
    }
    with open(out / "pipeline.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


if __name__ == "__main__":
    write_fixtures(sys.argv[1] if len(sys.argv) > 1 else "fixtures/synthetic")
