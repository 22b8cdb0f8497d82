"""Scoring and the paired-sentence bias audit."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .dataio import _check_cell, _lines
from .errors import FormatError, MissingIdError, UndefinedCorrelationError

AXES = ("gender", "race")


def pearson(a, b) -> float:
    """Sample Pearson correlation; raises when either side has zero variance."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] < 2:
        raise UndefinedCorrelationError("pearson needs at least 2 points")
    da = a - a.mean()
    db = b - b.mean()
    saa = float(da @ da)
    sbb = float(db @ db)
    if saa == 0.0 or sbb == 0.0:
        raise UndefinedCorrelationError("correlation undefined: zero variance input")
    r = float(da @ db) / math.sqrt(saa * sbb)
    return min(1.0, max(-1.0, r))


def jaccard_multilabel(G, P) -> float:
    """Mean per-sample |G & P| / |G | P|; a row where both are empty scores 1."""
    G = np.asarray(G).astype(bool)
    P = np.asarray(P).astype(bool)
    if G.shape != P.shape:
        raise ValueError(f"shape mismatch: {G.shape} vs {P.shape}")
    if G.ndim == 1:
        G, P = G[None, :], P[None, :]
    if G.shape[0] == 0:
        raise ValueError("jaccard needs at least one sample")
    inter = (G & P).sum(axis=1)
    union = (G | P).sum(axis=1)
    per_row = np.where(union == 0, 1.0, inter / np.maximum(union, 1))
    return float(per_row.mean())


def macro_average(values: Sequence[float]) -> float:
    values = list(values)
    if not values:
        raise ValueError("macro average of an empty list")
    return math.fsum(values) / len(values)


@dataclass
class EvalReport:
    per_emotion: dict[str, float] = field(default_factory=dict)
    macro: float | None = None
    jaccard: float | None = None
    n_samples: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        parts = [f"{emo}={r:.4f}" for emo, r in self.per_emotion.items()]
        if self.macro is not None:
            parts.append(f"macro_pearson={self.macro:.4f}")
        if self.jaccard is not None:
            parts.append(f"jaccard={self.jaccard:.4f}")
        parts.append(f"n={self.n_samples}")
        return " ".join(parts)


def regression_report(gold: Mapping[str, tuple[str, float]], pred: Mapping[str, float]) -> EvalReport:
    """Pearson per emotion over ids in ``gold`` (id -> (emotion, value))."""
    by_emotion: dict[str, tuple[list, list]] = {}
    for sid, (emotion, value) in gold.items():
        if sid not in pred:
            raise MissingIdError(f"no prediction for id {sid!r}")
        g, p = by_emotion.setdefault(emotion, ([], []))
        g.append(value)
        p.append(pred[sid])
    per = {emo: pearson(g, p) for emo, (g, p) in sorted(by_emotion.items())}
    return EvalReport(per, macro_average(per.values()) if per else None, None, len(gold))


def multilabel_report(G, P) -> EvalReport:
    return EvalReport({}, None, jaccard_multilabel(G, P), int(np.asarray(G).shape[0]))


class BiasPair(NamedTuple):
    id_a: str
    id_b: str
    axis: str
    emotion: str


def read_bias_pairs(path) -> list[BiasPair]:
    """``id_A<TAB>id_B<TAB>gender|race<TAB>emotion`` rows.

    Variant A is the female (gender) or African-American-name (race) sentence.
    """
    out = []
    for lineno, line in _lines(path):
        cells = line.split("\t")
        if len(cells) != 4:
            raise FormatError("expected 'id_A<TAB>id_B<TAB>axis<TAB>emotion'", path, lineno)
        a, b, axis, emotion = cells
        if axis not in AXES:
            raise FormatError(f"axis must be gender or race, got {axis!r}", path, lineno)
        if a == b:
            raise FormatError(f"pair ids must differ ({a!r})", path, lineno)
        out.append(BiasPair(a, b, axis, emotion))
    return out


def write_bias_pairs(pairs: Sequence[BiasPair], path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in pairs:
            fh.write("\t".join(_check_cell(c, "cell") for c in p) + "\n")


def bias_audit(predictions: Mapping[str, float], pairs: Sequence[BiasPair]) -> dict:
    """Mean signed score difference (A minus B) per (axis, emotion).

    Returns ``{(axis, emotion): {"mean_diff", "percent", "n_pairs"}}`` where
    ``percent`` is the difference expressed on the [0,1] scale times 100.
    """
    groups: dict[tuple[str, str], list[float]] = {}
    for p in pairs:
        for sid in (p.id_a, p.id_b):
            if sid not in predictions:
                raise MissingIdError(f"no prediction for id {sid!r}")
        groups.setdefault((p.axis, p.emotion), []).append(predictions[p.id_a] - predictions[p.id_b])
    out = {}
    for key in sorted(groups):
        diffs = groups[key]
        mean = math.fsum(diffs) / len(diffs)
        out[key] = {"mean_diff": mean, "percent": 100.0 * mean, "n_pairs": len(diffs)}
    return out


def bias_report_text(audit: dict) -> str:
    return "\n".join(
        f"{axis}\t{emotion}\t{v['percent']:+.2f}%\t(n={v['n_pairs']})"
        for (axis, emotion), v in audit.items()
    )


def bias_report_json(audit: dict) -> str:
    rows = [{"axis": a, "emotion": e, **v} for (a, e), v in audit.items()]
    return json.dumps(rows, indent=2, sort_keys=True) + "\n"
