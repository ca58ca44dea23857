"""Binary classification metrics: confusion counts, per-class scores with
macro and weighted averages, ROC points and AUC."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DataError


class Score(float):
    """A metric value that remembers whether it came from a 0/0 cell.

    Degenerate cells (say precision with no positive predictions) are
    reported as 0.0 so averages and tables stay total, but the flag keeps
    the distinction between a true zero and an undefined one.
    """

    degenerate: bool

    def __new__(cls, value: float, degenerate: bool = False):
        obj = super().__new__(cls, value)
        obj.degenerate = degenerate
        return obj


def _ratio(num: int, den: int) -> Score:
    if den == 0:
        return Score(0.0, degenerate=True)
    return Score(num / den)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with class 1 (default) as the positive class."""

    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise DataError(f"{name} must be >= 0")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def swapped(self) -> "ConfusionMatrix":
        """The same outcomes viewed with class 0 as positive."""
        return ConfusionMatrix(tp=self.tn, tn=self.tp, fp=self.fn, fn=self.fp)

    def to_json_dict(self) -> dict:
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn}


def _check_binary(v, name):
    v = np.asarray(v)
    if v.ndim != 1 or v.size == 0:
        raise DataError(f"{name} must be a non-empty 1-D vector")
    if not np.isin(v, (0, 1)).all():
        raise DataError(f"{name} must contain only 0 and 1")
    return v.astype(np.int64)


def confusion(y_true, y_pred) -> ConfusionMatrix:
    y_true = _check_binary(y_true, "y_true")
    y_pred = _check_binary(y_pred, "y_pred")
    if y_true.shape != y_pred.shape:
        raise DataError(f"length mismatch: {y_true.size} vs {y_pred.size}")
    tp = int(np.count_nonzero((y_true == 1) & (y_pred == 1)))
    tn = int(np.count_nonzero((y_true == 0) & (y_pred == 0)))
    fp = int(np.count_nonzero((y_true == 0) & (y_pred == 1)))
    fn = int(np.count_nonzero((y_true == 1) & (y_pred == 0)))
    return ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


def precision(cm: ConfusionMatrix) -> Score:
    return _ratio(cm.tp, cm.tp + cm.fp)


def recall(cm: ConfusionMatrix) -> Score:
    return _ratio(cm.tp, cm.tp + cm.fn)


def specificity(cm: ConfusionMatrix) -> Score:
    return _ratio(cm.tn, cm.fp + cm.tn)


def f1_from_precision_recall(p: float, r: float) -> Score:
    """Harmonic mean 2PR/(P+R); degenerate when both inputs are zero."""
    if p < 0 or r < 0:
        raise DataError("precision and recall must be >= 0")
    if p + r == 0:
        return Score(0.0, degenerate=True)
    return Score(2.0 * p * r / (p + r))


def f1(cm: ConfusionMatrix) -> Score:
    return f1_from_precision_recall(precision(cm), recall(cm))


def accuracy(cm: ConfusionMatrix) -> Score:
    return _ratio(cm.tp + cm.tn, cm.total)


class ScoreTriple(NamedTuple):
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ClassScores:
    precision: Score
    recall: Score
    f1: Score
    support: int

    def to_json_dict(self) -> dict:
        flags = sorted(
            name
            for name in ("precision", "recall", "f1")
            if getattr(self, name).degenerate
        )
        return {
            "precision": float(self.precision),
            "recall": float(self.recall),
            "f1": float(self.f1),
            "support": self.support,
            "degenerate": flags,
        }


@dataclass(frozen=True)
class ClassificationReport:
    """Per-class scores plus the accuracy / macro / weighted summary."""

    confusion: ConfusionMatrix
    class0: ClassScores
    class1: ClassScores
    accuracy: float
    macro: ScoreTriple
    weighted: ScoreTriple

    @property
    def total(self) -> int:
        return self.class0.support + self.class1.support

    def to_json_dict(self) -> dict:
        return {
            "confusion": self.confusion.to_json_dict(),
            "class0": self.class0.to_json_dict(),
            "class1": self.class1.to_json_dict(),
            "accuracy": float(self.accuracy),
            "macro": {
                "precision": float(self.macro.precision),
                "recall": float(self.macro.recall),
                "f1": float(self.macro.f1),
            },
            "weighted": {
                "precision": float(self.weighted.precision),
                "recall": float(self.weighted.recall),
                "f1": float(self.weighted.f1),
            },
        }


def report(y_true, y_pred) -> ClassificationReport:
    cm = confusion(y_true, y_pred)
    swapped = cm.swapped()
    c1 = ClassScores(precision(cm), recall(cm), f1(cm), support=cm.tp + cm.fn)
    c0 = ClassScores(
        precision(swapped), recall(swapped), f1(swapped), support=cm.tn + cm.fp
    )
    total = cm.total
    w0 = c0.support / total
    w1 = c1.support / total
    macro = ScoreTriple(
        (c0.precision + c1.precision) / 2.0,
        (c0.recall + c1.recall) / 2.0,
        (c0.f1 + c1.f1) / 2.0,
    )
    weighted = ScoreTriple(
        w0 * c0.precision + w1 * c1.precision,
        w0 * c0.recall + w1 * c1.recall,
        w0 * c0.f1 + w1 * c1.f1,
    )
    return ClassificationReport(
        confusion=cm,
        class0=c0,
        class1=c1,
        accuracy=float(accuracy(cm)),
        macro=macro,
        weighted=weighted,
    )


def render_report(rep: ClassificationReport) -> str:
    """Plain-text table, 2-decimal cells.

    Columns: class 0, class 1, accuracy, macro average, weighted average;
    rows: precision, recall, f1-score. The accuracy column repeats the
    single accuracy value on every row.
    """
    header = ["", "0.0", "1.0", "Accuracy", "Macro Average", "Weighted Average"]
    acc = f"{rep.accuracy:.2f}"
    body = [
        ["Precision"]
        + [
            f"{v:.2f}"
            for v in (
                rep.class0.precision,
                rep.class1.precision,
            )
        ]
        + [acc, f"{rep.macro.precision:.2f}", f"{rep.weighted.precision:.2f}"],
        ["Recall"]
        + [f"{v:.2f}" for v in (rep.class0.recall, rep.class1.recall)]
        + [acc, f"{rep.macro.recall:.2f}", f"{rep.weighted.recall:.2f}"],
        ["f1-score"]
        + [f"{v:.2f}" for v in (rep.class0.f1, rep.class1.f1)]
        + [acc, f"{rep.macro.f1:.2f}", f"{rep.weighted.f1:.2f}"],
    ]
    rows = [header] + body
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = []
    for r in rows:
        cells = [r[0].ljust(widths[0])] + [
            r[i].rjust(widths[i]) for i in range(1, len(header))
        ]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]
    auc: float

    def __post_init__(self):
        if self.points[0] != (0.0, 0.0) or self.points[-1] != (1.0, 1.0):
            raise DataError("ROC must run from (0,0) to (1,1)")


def roc(y_true, scores) -> RocCurve:
    """ROC points over descending score thresholds and the exact trapezoid AUC.

    One threshold per distinct score value plus a sentinel above the maximum;
    a below-minimum sentinel would repeat the final (1,1) point and is
    omitted. Tied scores move between points together. The trapezoid area is
    accumulated over integer counts and divided once at the end, which makes
    it exactly the tie-corrected rank statistic.
    """
    y = _check_binary(y_true, "y_true")
    s = np.asarray(scores, dtype=np.float64)
    if s.shape != y.shape:
        raise DataError(f"length mismatch: {y.size} labels vs {s.size} scores")
    if np.any(s < 0.0) or np.any(s > 1.0):
        raise DataError("scores must lie in [0, 1]")
    n1 = int(np.count_nonzero(y == 1))
    n0 = int(y.size - n1)
    if n0 == 0 or n1 == 0:
        raise DataError("AUC is undefined when only one class is present")

    order = np.argsort(-s, kind="stable")
    sy = y[order]
    ss = s[order]
    # Indices closing each group of tied scores.
    ends = np.nonzero(np.append(ss[:-1] > ss[1:], True))[0]
    cum_tp = np.concatenate(([0], np.cumsum(sy)[ends]))
    cum_fp = np.concatenate(([0], ends + 1 - np.cumsum(sy)[ends]))

    area2 = int(np.sum(np.diff(cum_fp) * (cum_tp[:-1] + cum_tp[1:])))
    auc = area2 / (2 * n0 * n1)
    points = tuple(
        (int(fp) / n0, int(tp) / n1) for fp, tp in zip(cum_fp, cum_tp)
    )
    return RocCurve(points=points, auc=auc)
