"""Per-sample feature vectors: tweet-specific counts, averaged word vectors,
ingested sentence representations, and train-set standardization."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .dataio import (
    LabeledInstance,
    LexiconSet,
    SentenceFeatureMatrix,
    WordVectorTable,
    array_from_payload,
    array_payload,
)
from .errors import MissingIdError
from .textprep import normalize_tokenize

STD_FLOOR = 1e-12
N_TWEET_FEATURES = 6
BLOCK_ORDER = ("sentence", "evec", "tweet")

_ELONGATED = re.compile(r"(.)\1\1", re.DOTALL)


class TweetFeatures(NamedTuple):
    n_uppercase: int
    n_pos_emoticons: int
    n_neg_emoticons: int
    emoji_valence_sum: int
    n_elongated: int
    n_excl_quest: int

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=np.float64)


class _Matcher:
    """Greedy longest-match scanner over a fixed set of strings."""

    def __init__(self, patterns):
        self.by_first: dict[str, list[str]] = {}
        for p in patterns:
            if p:
                self.by_first.setdefault(p[0], []).append(p)
        for lst in self.by_first.values():
            lst.sort(key=len, reverse=True)

    def finditer(self, text):
        i = 0
        n = len(text)
        while i < n:
            for p in self.by_first.get(text[i], ()):
                if text.startswith(p, i):
                    yield p
                    i += len(p)
                    break
            else:
                i += 1


_matcher_cache: dict[int, tuple[LexiconSet, _Matcher, _Matcher]] = {}


def _matchers(lex: LexiconSet):
    hit = _matcher_cache.get(id(lex))
    if hit is not None and hit[0] is lex:
        return hit[1], hit[2]
    emoticons = _Matcher(list(lex.pos_emoticons) + list(lex.neg_emoticons))
    emoji = _Matcher(lex.emoji_valence)
    _matcher_cache[id(lex)] = (lex, emoticons, emoji)
    return emoticons, emoji


def tweet_specific_features(raw_text: str, lex: LexiconSet) -> TweetFeatures:
    """Count surface cues in the unnormalized tweet text.

    Uppercase words are whitespace tokens of two or more letters, all
    uppercase.  Emoticons and emoji are matched left to right, longest
    first, without overlap.  A word is elongated when some character
    repeats at least three times in a row.
    """
    words = raw_text.split()
    n_upper = sum(1 for w in words if len(w) >= 2 and w.isalpha() and w.isupper())
    emoticons, emoji = _matchers(lex)
    pos = set(lex.pos_emoticons)
    n_pos = n_neg = 0
    for hit in emoticons.finditer(raw_text):
        if hit in pos:
            n_pos += 1
        else:
            n_neg += 1
    valence = sum(lex.emoji_valence[e] for e in emoji.finditer(raw_text))
    n_elong = sum(1 for w in words if _ELONGATED.search(w))
    n_marks = raw_text.count("!") + raw_text.count("?")
    return TweetFeatures(n_upper, n_pos, n_neg, int(valence), n_elong, n_marks)


def evec_sentence_vector(tokens: Sequence[str], table: WordVectorTable) -> np.ndarray:
    """Average word vectors; out-of-vocabulary tokens count as zero vectors."""
    out = np.zeros(table.dim)
    if not tokens:
        return out
    rows = [table.index[t] for t in tokens if t in table.index]
    if rows:
        out = table.vectors[rows].sum(axis=0)
    return out / len(tokens)


@dataclass
class AssembledFeatures:
    ids: list[str]
    matrix: np.ndarray
    block_layout: dict[str, tuple[int, int]]

    @property
    def width(self) -> int:
        return self.matrix.shape[1]

    def select(self, blocks: Sequence[str]) -> "AssembledFeatures":
        """Keep only the named blocks, in canonical order (for ablations)."""
        unknown = set(blocks) - set(self.block_layout)
        if unknown:
            raise KeyError(f"blocks not present: {sorted(unknown)}")
        cols, layout, start = [], {}, 0
        for name in BLOCK_ORDER:
            if name in blocks:
                a, b = self.block_layout[name]
                cols.append(self.matrix[:, a:b])
                layout[name] = (start, start + b - a)
                start += b - a
        matrix = np.hstack(cols) if cols else np.zeros((len(self.ids), 0))
        return AssembledFeatures(list(self.ids), matrix, layout)

    def to_matrix(self) -> SentenceFeatureMatrix:
        return SentenceFeatureMatrix(self.ids, self.matrix)


def assemble(
    dataset: Sequence[LabeledInstance],
    sentence: SentenceFeatureMatrix | None = None,
    word_vectors: WordVectorTable | None = None,
    tweet_features: bool = False,
    lex: LexiconSet | None = None,
) -> AssembledFeatures:
    """Concatenate the selected blocks per sample as sentence | evec | tweet.

    Instances whose ``tokens`` are unset are tokenized here against the
    word-vector vocabulary, segmenting unknown words with ``lex.word_freq``.
    """
    if tweet_features and lex is None:
        raise ValueError("tweet features need a lexicon set")
    ids = [inst.id for inst in dataset]
    blocks, layout, start = [], {}, 0
    if sentence is not None:
        missing = [i for i in ids if i not in sentence]
        if missing:
            raise MissingIdError(
                f"{len(missing)} id(s) missing from sentence features, first: {missing[0]!r}"
            )
        block = sentence.matrix[[sentence.index[i] for i in ids]].reshape(len(ids), sentence.dim)
        blocks.append(block)
        layout["sentence"] = (start, start + sentence.dim)
        start += sentence.dim
    if word_vectors is not None:
        freq = lex.word_freq if lex is not None else None
        rows = []
        for inst in dataset:
            toks = inst.tokens
            if toks is None:
                toks = normalize_tokenize(inst.raw_text, word_vectors.index, freq)
            rows.append(evec_sentence_vector(toks, word_vectors))
        blocks.append(np.array(rows).reshape(len(ids), word_vectors.dim))
        layout["evec"] = (start, start + word_vectors.dim)
        start += word_vectors.dim
    if tweet_features:
        rows = [tweet_specific_features(inst.raw_text, lex).as_array() for inst in dataset]
        blocks.append(np.array(rows).reshape(len(ids), N_TWEET_FEATURES))
        layout["tweet"] = (start, start + N_TWEET_FEATURES)
        start += N_TWEET_FEATURES
    matrix = np.hstack(blocks) if blocks else np.zeros((len(ids), 0))
    return AssembledFeatures(ids, matrix, layout)


class FeatureScaler:
    """Column-wise z-scoring with statistics from the training rows only."""

    model_kind = "scaler"

    def __init__(self, means, stddevs):
        self.means = np.asarray(means, dtype=np.float64)
        self.stddevs = np.asarray(stddevs, dtype=np.float64)
        if self.means.shape != self.stddevs.shape:
            raise ValueError("means and stddevs differ in length")
        if np.any(self.stddevs <= 0):
            raise ValueError("stddevs must be strictly positive")

    def transform(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.means.shape[0]:
            raise ValueError(f"expected {self.means.shape[0]} columns, got {X.shape[-1]}")
        return (X - self.means) / self.stddevs

    def inverse_transform(self, Z):
        return np.asarray(Z, dtype=np.float64) * self.stddevs + self.means

    def predict(self, X):
        return self.transform(X)

    def to_payload(self):
        return {"kind": "scaler", "means": array_payload(self.means),
                "stddevs": array_payload(self.stddevs)}

    @classmethod
    def from_payload(cls, p):
        return cls(array_from_payload(p["means"]), array_from_payload(p["stddevs"]))


def _as_matrix(features):
    if isinstance(features, AssembledFeatures):
        return features.matrix
    return np.asarray(features, dtype=np.float64)


def fit_scaler(train) -> FeatureScaler:
    X = _as_matrix(train)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("fitting a scaler needs at least 2 training rows")
    means = X.mean(axis=0)
    # the float mean of a constant column can be off by an ulp, which the
    # floor would amplify to a visible offset
    const = X.max(axis=0) == X.min(axis=0)
    means[const] = X[0, const]
    return FeatureScaler(means, np.maximum(X.std(axis=0), STD_FLOOR))


def apply_scaler(scaler: FeatureScaler, features):
    if isinstance(features, AssembledFeatures):
        return AssembledFeatures(list(features.ids), scaler.transform(features.matrix),
                                 dict(features.block_layout))
    return scaler.transform(features)
