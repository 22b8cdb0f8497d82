"""Readers and writers for every external file format, plus model persistence.

All text files are UTF-8.  TSV files use a single tab separator and no
quoting, so fields may not contain tabs or newlines.  Writers emit floats
with ``repr`` which round-trips IEEE doubles exactly.
"""
from __future__ import annotations

import importlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import FormatError, ModelFormatError, RangeError

EMOTIONS = ("anger", "fear", "joy", "sadness", "valence")
ORDINALS = {
    "anger": tuple(range(0, 4)),
    "fear": tuple(range(0, 4)),
    "joy": tuple(range(0, 4)),
    "sadness": tuple(range(0, 4)),
    "valence": tuple(range(-3, 4)),
}

MODEL_FORMAT_VERSION = 1

# kind -> "module:Class" implementing to_payload() / from_payload()
_MODEL_REGISTRY = {
    "krr": "affectkit.regress:KernelModel",
    "svr": "affectkit.regress:KernelModel",
    "ordmap": "affectkit.ordmap:OrdinalMapper",
    "rlr": "affectkit.multilabel:MultiLabelModel",
    "chains": "affectkit.multilabel:ChainEnsemble",
    "evec": "affectkit.evec:EvecModel",
    "scaler": "affectkit.features:FeatureScaler",
}


@dataclass
class LabeledInstance:
    id: str
    raw_text: str
    emotion: str | None = None
    reg_label: float | None = None
    ord_label: int | None = None
    multilabels: tuple[int, ...] | None = None
    tokens: list[str] | None = None

    def __post_init__(self):
        if self.emotion is not None and self.emotion not in EMOTIONS:
            raise ValueError(f"unknown emotion {self.emotion!r}")
        if self.reg_label is not None and not 0.0 <= self.reg_label <= 1.0:
            raise RangeError(f"{self.id}: regression label {self.reg_label} outside [0,1]")
        if self.ord_label is not None:
            allowed = ORDINALS.get(self.emotion) if self.emotion else None
            if allowed is not None and self.ord_label not in allowed:
                raise RangeError(
                    f"{self.id}: ordinal {self.ord_label} not in {list(allowed)} for {self.emotion}"
                )
        if self.multilabels is not None:
            self.multilabels = tuple(int(b) for b in self.multilabels)
            if any(b not in (0, 1) for b in self.multilabels):
                raise ValueError(f"{self.id}: multilabels must be 0/1")


class WordVectorTable:
    """Token -> dense vector of a fixed dimension.

    Vectors are stored as rows of one read-only float64 matrix so lookups of
    many tokens can be done with a single fancy index.
    """

    def __init__(self, tokens: Sequence[str], vectors):
        vectors = np.array(vectors, dtype=np.float64, copy=True)
        if vectors.ndim != 2 or vectors.shape[0] != len(tokens):
            raise ValueError("vectors must be a len(tokens) x dim matrix")
        if vectors.shape[1] < 1:
            raise ValueError("dimension must be positive")
        index = {}
        for i, tok in enumerate(tokens):
            if tok in index:
                raise FormatError(f"duplicate token {tok!r}")
            index[tok] = i
        vectors.flags.writeable = False
        self.tokens = tuple(tokens)
        self.vectors = vectors
        self.index = index

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def entries(self) -> dict[str, np.ndarray]:
        return {t: self.vectors[i] for t, i in self.index.items()}

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index

    def __getitem__(self, token) -> np.ndarray:
        return self.vectors[self.index[token]]

    def __eq__(self, other):
        if not isinstance(other, WordVectorTable):
            return NotImplemented
        return self.tokens == other.tokens and np.array_equal(self.vectors, other.vectors)


class SentenceFeatureMatrix:
    """Sample id -> fixed-size representation produced by an external encoder."""

    def __init__(self, ids: Sequence[str], rows):
        rows = np.array(rows, dtype=np.float64, copy=True)
        if rows.ndim != 2 or rows.shape[0] != len(ids):
            raise ValueError("rows must be a len(ids) x dim matrix")
        if rows.shape[1] < 1:
            raise ValueError("dimension must be positive")
        index = {}
        for i, sid in enumerate(ids):
            if sid in index:
                raise FormatError(f"duplicate id {sid!r}")
            index[sid] = i
        rows.flags.writeable = False
        self.ids = tuple(ids)
        self.matrix = rows
        self.index = index

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def rows(self) -> dict[str, np.ndarray]:
        return {s: self.matrix[i] for s, i in self.index.items()}

    def __len__(self):
        return len(self.ids)

    def __contains__(self, sid):
        return sid in self.index

    def __getitem__(self, sid) -> np.ndarray:
        return self.matrix[self.index[sid]]

    def __eq__(self, other):
        if not isinstance(other, SentenceFeatureMatrix):
            return NotImplemented
        return self.ids == other.ids and np.array_equal(self.matrix, other.matrix)


@dataclass
class LexiconSet:
    emoji_valence: dict[str, int] = field(default_factory=dict)
    pos_emoticons: list[str] = field(default_factory=list)
    neg_emoticons: list[str] = field(default_factory=list)
    word_freq: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        both = set(self.pos_emoticons) & set(self.neg_emoticons)
        if both:
            raise ValueError(f"emoticons listed as both positive and negative: {sorted(both)}")
        bad = [w for w, c in self.word_freq.items() if c < 1]
        if bad:
            raise ValueError(f"word frequencies must be >= 1: {bad[:5]}")


def _lines(path):
    """Yield (line number, line) with the newline removed; blank lines skipped."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            yield lineno, line


def _check_cell(value: str, what: str):
    if "\t" in value or "\n" in value or "\r" in value:
        raise FormatError(f"{what} contains a tab or newline: {value!r}")
    return value


def _parse_float(cell, path, lineno):
    try:
        value = float(cell)
    except ValueError:
        raise FormatError(f"not a number: {cell!r}", path, lineno) from None
    if not math.isfinite(value):
        raise FormatError(f"non-finite value: {cell!r}", path, lineno)
    return value


def _parse_ordinal_cell(cell, path, lineno):
    head = cell.split(":", 1)[0].strip()
    try:
        return int(head)
    except ValueError:
        raise FormatError(f"ordinal class cell has no integer prefix: {cell!r}", path, lineno) from None


# ---------------------------------------------------------------------------
# competition datasets

def read_intensity_dataset(path, kind: str = "reg") -> list[LabeledInstance]:
    """Read an EI/V regression (``kind="reg"``) or ordinal (``kind="oc"``) file.

    Columns: ID, Tweet, Affect Dimension, Intensity Score | Intensity Class.
    An ordinal cell such as ``"2: moderate amount of fear"`` yields 2.
    """
    if kind not in ("reg", "oc"):
        raise ValueError(f"kind must be 'reg' or 'oc', got {kind!r}")
    out = []
    rows = _lines(path)
    try:
        next(rows)
    except StopIteration:
        raise FormatError("missing header row", path) from None
    for lineno, line in rows:
        cells = line.split("\t")
        if len(cells) != 4:
            raise FormatError(f"expected 4 columns, found {len(cells)}", path, lineno)
        sid, text, dimension, label = cells
        emotion = dimension.strip().lower()
        if emotion not in EMOTIONS:
            raise FormatError(f"unknown affect dimension {dimension!r}", path, lineno)
        if kind == "reg":
            score = _parse_float(label, path, lineno)
            if not 0.0 <= score <= 1.0:
                raise RangeError(f"{path}:{lineno}: intensity {score} outside [0,1]")
            out.append(LabeledInstance(sid, text, emotion, reg_label=score))
        else:
            ordinal = _parse_ordinal_cell(label, path, lineno)
            if ordinal not in ORDINALS[emotion]:
                raise RangeError(
                    f"{path}:{lineno}: ordinal {ordinal} not in {list(ORDINALS[emotion])}"
                )
            out.append(LabeledInstance(sid, text, emotion, ord_label=ordinal))
    return out


def write_intensity_dataset(instances: Iterable[LabeledInstance], path, kind: str = "reg"):
    if kind not in ("reg", "oc"):
        raise ValueError(f"kind must be 'reg' or 'oc', got {kind!r}")
    last = "Intensity Score" if kind == "reg" else "Intensity Class"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"ID\tTweet\tAffect Dimension\t{last}\n")
        for inst in instances:
            if kind == "reg":
                cell = repr(float(inst.reg_label))
            else:
                cell = f"{int(inst.ord_label)}: class {int(inst.ord_label)}"
            fh.write(
                f"{_check_cell(inst.id, 'id')}\t{_check_cell(inst.raw_text, 'tweet')}"
                f"\t{inst.emotion}\t{cell}\n"
            )


def read_multilabel_dataset(path) -> tuple[list[str], list[LabeledInstance]]:
    """Read an E-c file: ID, Tweet, then one 0/1 column per label.

    Label names and their order come from the header.
    """
    rows = _lines(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise FormatError("missing header row", path) from None
    names = header.split("\t")[2:]
    if not names:
        raise FormatError("header has no label columns", path, 1)
    width = len(names) + 2
    out = []
    for lineno, line in rows:
        cells = line.split("\t")
        if len(cells) != width:
            raise FormatError(f"expected {width} columns, found {len(cells)}", path, lineno)
        bits = []
        for c in cells[2:]:
            c = c.strip()
            if c not in ("0", "1"):
                raise FormatError(f"non-binary label cell {c!r}", path, lineno)
            bits.append(int(c))
        out.append(LabeledInstance(cells[0], cells[1], multilabels=tuple(bits)))
    return names, out


def write_multilabel_dataset(names: Sequence[str], instances: Iterable[LabeledInstance], path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(["ID", "Tweet", *(_check_cell(n, "label") for n in names)]) + "\n")
        for inst in instances:
            bits = inst.multilabels
            if bits is None or len(bits) != len(names):
                raise ValueError(f"{inst.id}: label vector does not match {len(names)} names")
            fh.write(
                "\t".join([_check_cell(inst.id, "id"), _check_cell(inst.raw_text, "tweet"),
                           *(str(int(b)) for b in bits)]) + "\n"
            )


def labels_matrix(instances: Sequence[LabeledInstance]) -> np.ndarray:
    return np.array([inst.multilabels for inst in instances], dtype=np.int64).reshape(len(instances), -1)


# ---------------------------------------------------------------------------
# vector tables

def read_word_vectors(path) -> WordVectorTable:
    tokens, rows = [], []
    seen = set()
    dim = None
    for lineno, line in _lines(path):
        parts = line.split()
        if dim is None:
            dim = len(parts) - 1
            if dim < 1:
                raise FormatError("line has no vector values", path, lineno)
        elif len(parts) - 1 != dim:
            raise FormatError(f"expected {dim} values, found {len(parts) - 1}", path, lineno)
        tok = parts[0]
        if tok in seen:
            raise FormatError(f"duplicate token {tok!r}", path, lineno)
        seen.add(tok)
        tokens.append(tok)
        rows.append([_parse_float(v, path, lineno) for v in parts[1:]])
    if dim is None:
        raise FormatError("empty word-vector file; dimension undefined", path)
    return WordVectorTable(tokens, np.array(rows, dtype=np.float64))


def write_word_vectors(table: WordVectorTable, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for tok, vec in zip(table.tokens, table.vectors):
            if not tok or any(ch.isspace() for ch in tok):
                raise FormatError(f"token {tok!r} cannot be written in whitespace format")
            fh.write(tok + " " + " ".join(repr(float(v)) for v in vec) + "\n")


def read_sentence_features(path) -> SentenceFeatureMatrix:
    """Read ``id<TAB>v1<TAB>v2...`` rows, with an optional ``#dim=<d>`` header."""
    ids, rows = [], []
    seen = set()
    declared = None
    dim = None
    for lineno, line in _lines(path):
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("dim="):
                if ids:
                    raise FormatError("#dim header must precede data rows", path, lineno)
                try:
                    declared = int(body[4:])
                except ValueError:
                    raise FormatError(f"bad dim header {line!r}", path, lineno) from None
                if declared < 1:
                    raise FormatError("declared dim must be positive", path, lineno)
            continue
        cells = line.split("\t")
        width = len(cells) - 1
        if declared is not None and width != declared:
            raise FormatError(f"row has {width} values but header declares {declared}", path, lineno)
        if dim is None:
            dim = width
            if dim < 1:
                raise FormatError("row has no feature values", path, lineno)
        elif width != dim:
            raise FormatError(f"expected {dim} values, found {width}", path, lineno)
        sid = cells[0]
        if sid in seen:
            raise FormatError(f"duplicate id {sid!r}", path, lineno)
        seen.add(sid)
        ids.append(sid)
        rows.append([_parse_float(v, path, lineno) for v in cells[1:]])
    if dim is None:
        if declared is None:
            raise FormatError("empty sentence-feature file; dimension undefined", path)
        return SentenceFeatureMatrix([], np.zeros((0, declared)))
    return SentenceFeatureMatrix(ids, np.array(rows, dtype=np.float64))


def write_sentence_features(matrix: SentenceFeatureMatrix, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#dim={matrix.dim}\n")
        for sid, row in zip(matrix.ids, matrix.matrix):
            fh.write(_check_cell(sid, "id") + "\t" + "\t".join(repr(float(v)) for v in row) + "\n")


# ---------------------------------------------------------------------------
# lexicons and small TSV formats

def read_emoji_valence(path) -> dict[str, int]:
    out = {}
    for lineno, line in _lines(path):
        cells = line.split("\t")
        if len(cells) != 2:
            raise FormatError("expected 'emoji<TAB>score'", path, lineno)
        try:
            out[cells[0]] = int(cells[1])
        except ValueError:
            raise FormatError(f"score is not an integer: {cells[1]!r}", path, lineno) from None
    return out


def read_emoticons(path) -> tuple[list[str], list[str]]:
    pos, neg = [], []
    for lineno, line in _lines(path):
        cells = line.split("\t")
        if len(cells) != 2 or cells[1] not in ("pos", "neg"):
            raise FormatError("expected 'emoticon<TAB>pos|neg'", path, lineno)
        (pos if cells[1] == "pos" else neg).append(cells[0])
    return pos, neg


def read_word_freq(path) -> dict[str, int]:
    out = {}
    for lineno, line in _lines(path):
        cells = line.split("\t")
        if len(cells) != 2:
            raise FormatError("expected 'token<TAB>count'", path, lineno)
        try:
            count = int(cells[1])
        except ValueError:
            raise FormatError(f"count is not an integer: {cells[1]!r}", path, lineno) from None
        if count < 1:
            raise FormatError(f"count must be >= 1, got {count}", path, lineno)
        if cells[0] in out:
            raise FormatError(f"duplicate token {cells[0]!r}", path, lineno)
        out[cells[0]] = count
    return out


def write_word_freq(freq: Mapping[str, int], path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for tok, count in freq.items():
            fh.write(f"{_check_cell(tok, 'token')}\t{int(count)}\n")


def _data_path(name):
    return Path(__file__).with_name("data") / name


def load_lexicons(emoji_path=None, emoticon_path=None, word_freq_path=None) -> LexiconSet:
    """Load lexicons, falling back to the shipped defaults for emoji and emoticons.

    There is no default frequency table; without one, segmentation is skipped.
    """
    emoji = read_emoji_valence(emoji_path or _data_path("emoji_valence.tsv"))
    pos, neg = read_emoticons(emoticon_path or _data_path("emoticons.tsv"))
    freq = read_word_freq(word_freq_path) if word_freq_path else {}
    return LexiconSet(emoji, pos, neg, freq)


def read_hashtag_corpus(path) -> list[tuple[str, str]]:
    """``label<TAB>text`` rows used to train emotional word vectors."""
    out = []
    for lineno, line in _lines(path):
        cells = line.split("\t")
        if len(cells) != 2:
            raise FormatError("expected 'label<TAB>text'", path, lineno)
        out.append((cells[0].strip(), cells[1]))
    return out


def write_hashtag_corpus(docs: Iterable[tuple[str, str]], path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for label, text in docs:
            fh.write(f"{_check_cell(label, 'label')}\t{_check_cell(text, 'text')}\n")


def read_predictions(path) -> dict[str, float]:
    """``id<TAB>score`` rows; order is preserved by the returned dict."""
    out = {}
    for lineno, line in _lines(path):
        cells = line.split("\t")
        if len(cells) != 2:
            raise FormatError("expected 'id<TAB>score'", path, lineno)
        if cells[0] in out:
            raise FormatError(f"duplicate id {cells[0]!r}", path, lineno)
        out[cells[0]] = _parse_float(cells[1], path, lineno)
    return out


def write_predictions(ids: Sequence[str], scores, path):
    scores = list(scores)
    if len(ids) != len(scores):
        raise ValueError("ids and scores differ in length")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sid, s in zip(ids, scores):
            value = int(s) if isinstance(s, (int, np.integer)) else repr(float(s))
            fh.write(f"{_check_cell(sid, 'id')}\t{value}\n")


def read_tokens(path) -> dict[str, list[str]]:
    out = {}
    for lineno, line in _lines(path):
        sid, _, rest = line.partition("\t")
        out[sid] = rest.split()
    return out


def write_tokens(instances: Iterable[LabeledInstance], path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for inst in instances:
            fh.write(f"{_check_cell(inst.id, 'id')}\t{' '.join(inst.tokens or [])}\n")


# ---------------------------------------------------------------------------
# model persistence

def persist_model(model, path):
    """Write ``model`` as a versioned JSON document.

    Floats are emitted by ``json`` through ``float.__repr__``, the shortest
    string that parses back to the same double, so round trips are exact.
    """
    payload = model.to_payload()
    kind = payload.get("kind")
    if kind not in _MODEL_REGISTRY:
        raise ModelFormatError(f"cannot persist model of kind {kind!r}")
    doc = {"kind": kind, "version": MODEL_FORMAT_VERSION, **payload}
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, allow_nan=False)
        fh.write("\n")
    os.replace(tmp, path)


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not a JSON model file ({exc})") from None
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{path}: model document must be a JSON object")
    kind, version = doc.get("kind"), doc.get("version")
    if kind not in _MODEL_REGISTRY:
        raise ModelFormatError(f"{path}: unknown model kind {kind!r}")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported version {version!r} for kind {kind!r} "
            f"(expected {MODEL_FORMAT_VERSION})"
        )
    module_name, cls_name = _MODEL_REGISTRY[kind].split(":")
    cls = getattr(importlib.import_module(module_name), cls_name)
    try:
        return cls.from_payload(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed {kind} model: {exc}") from None


def array_payload(a) -> dict:
    a = np.asarray(a, dtype=np.float64)
    return {"shape": list(a.shape), "data": a.ravel().tolist()}


def array_from_payload(p) -> np.ndarray:
    return np.array(p["data"], dtype=np.float64).reshape(p["shape"])
