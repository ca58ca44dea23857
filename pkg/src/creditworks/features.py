"""Exploratory feature statistics and standardization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dataset import DesignMatrix
from .errors import DataError


class PearsonResult(NamedTuple):
    r: float
    defined: bool


def pearson(x, y) -> PearsonResult:
    """Pearson correlation of two equal-length vectors.

    When either vector is constant the coefficient has no value; the result
    carries r=0.0 with defined=False rather than NaN so report code can sort
    and print without special-casing.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1:
        raise DataError("pearson expects 1-D vectors")
    if x.shape != y.shape:
        raise DataError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.size < 2:
        raise DataError("pearson needs at least 2 observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(np.sqrt(np.dot(dx, dx)))
    sy = float(np.sqrt(np.dot(dy, dy)))
    if sx == 0.0 or sy == 0.0:
        return PearsonResult(0.0, False)
    return PearsonResult(float(np.dot(dx, dy) / (sx * sy)), True)


def correlation_report(matrix, target=None) -> tuple[tuple[str, float, bool], ...]:
    """Correlation of every design-matrix column against the target.

    Returns (name, r, defined) triples sorted by r descending, ties broken
    by column name, so the strongest default signals list first.
    """
    y = np.asarray(matrix.y if target is None else target, dtype=np.float64)
    rows = []
    for j, name in enumerate(matrix.columns):
        r, defined = pearson(matrix.x[:, j], y)
        rows.append((name, r, defined))
    rows.sort(key=lambda t: (-t[1], t[0]))
    return tuple(rows)


@dataclass(frozen=True)
class Scaler:
    """Column-wise standardizer fitted on training data only.

    Uses the population standard deviation. Constant columns keep scale 1
    so they pass through centered at zero instead of dividing by zero.
    """

    mean: np.ndarray
    scale: np.ndarray
    columns: tuple[str, ...]

    @classmethod
    def fit(cls, matrix) -> "Scaler":
        x = np.asarray(matrix.x, dtype=np.float64)
        if x.shape[0] == 0:
            raise DataError("cannot fit a scaler on an empty matrix")
        mean = x.mean(axis=0)
        scale = x.std(axis=0)
        scale = np.where(scale == 0.0, 1.0, scale)
        mean.setflags(write=False)
        scale.setflags(write=False)
        return cls(mean=mean, scale=scale, columns=tuple(matrix.columns))

    def transform(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.shape[1] != self.mean.shape[0]:
            raise DataError(
                f"scaler fitted on {self.mean.shape[0]} columns, got {x.shape[1]}"
            )
        return (x - self.mean) / self.scale

    def inverse_transform(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        if z.ndim == 1:
            z = z.reshape(1, -1)
        if z.shape[1] != self.mean.shape[0]:
            raise DataError(
                f"scaler fitted on {self.mean.shape[0]} columns, got {z.shape[1]}"
            )
        return z * self.scale + self.mean

    def to_json_dict(self) -> dict:
        return {
            "columns": list(self.columns),
            "mean": [float(v) for v in self.mean],
            "scale": [float(v) for v in self.scale],
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "Scaler":
        mean = np.asarray(payload["mean"], dtype=np.float64)
        scale = np.asarray(payload["scale"], dtype=np.float64)
        columns = tuple(payload["columns"])
        if mean.shape != scale.shape or mean.shape[0] != len(columns):
            raise DataError("scaler payload has inconsistent lengths")
        mean.setflags(write=False)
        scale.setflags(write=False)
        return cls(mean=mean, scale=scale, columns=columns)


def fit_scaler(matrix) -> Scaler:
    """Fit a standardizer to a design matrix (training half only)."""
    return Scaler.fit(matrix)


def apply_scaler(scaler: Scaler, matrix) -> DesignMatrix:
    """Standardize a design matrix with previously fitted parameters."""
    if tuple(matrix.columns) != scaler.columns:
        raise DataError("scaler was fitted on different columns")
    return DesignMatrix(
        columns=matrix.columns, x=scaler.transform(matrix.x), y=matrix.y
    )


# Sanity screens for obviously out-of-range exploratory values. Each rule is
# (column, predicate description, predicate).
DEFAULT_THRESHOLD_RULES = (
    ("annual_inc", "> 1000000", lambda v: v > 1_000_000),
    ("open_acc", "> 40", lambda v: v > 40),
    ("total_acc", "> 80", lambda v: v > 80),
)


def threshold_counts(table, rules=DEFAULT_THRESHOLD_RULES) -> tuple[tuple[str, str, int], ...]:
    """Count rows exceeding each screening rule; unknown columns count as absent."""
    out = []
    for name, label, pred in rules:
        if not table.has_column(name):
            continue
        cells = table.column(name)
        hits = sum(1 for c in cells if c is not None and pred(c))
        out.append((name, label, hits))
    return tuple(out)
