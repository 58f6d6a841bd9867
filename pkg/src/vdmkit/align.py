"""Aggregating pairwise human preferences and scoring metric alignment.

A pairwise preference matrix holds, at [i, j], the fraction of raters who
preferred item i over item j (ties allowed, so [i, j] + [j, i] may fall short
of 1). Column-normalizing and row-averaging turns it into a priority vector;
inverting and renormalizing flips it into zero-is-best orientation so it can
be compared against distance-metric outputs with cosine similarity.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, DimensionMismatchError

__all__ = [
    "PairwiseMatrix",
    "PriorityVector",
    "priority_vector",
    "invert_renormalize",
    "align_score",
    "load_pairwise",
    "load_metric_values",
]

SUM_TOL = 1e-10


@dataclass(frozen=True)
class PairwiseMatrix:
    """k x k preference fractions with a zero diagonal.

    Entries may be given as percentages; any value above 1 switches the whole
    matrix to percent interpretation and divides by 100.
    """

    labels: tuple
    matrix: np.ndarray

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        m = np.array(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DataError(f"matrix must be square, got shape {m.shape}")
        k = m.shape[0]
        if k < 2:
            raise DataError(f"need at least 2 items, got {k}")
        if len(labels) != k:
            raise DimensionMismatchError(f"{len(labels)} labels for {k} rows")
        if len(set(labels)) != k:
            raise DataError("labels must be unique")
        if not np.isfinite(m).all():
            raise DataError("matrix entries must be finite")
        if m.max() > 1.0:
            m = m / 100.0
        if m.min() < 0.0 or m.max() > 1.0:
            raise DataError("entries must lie in [0, 1] (or [0, 100] as percent)")
        if np.any(np.diag(m) != 0.0):
            raise DataError("diagonal must be exactly 0")
        m.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", m)

    @property
    def k(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PriorityVector:
    """Nonnegative weights over labeled items, summing to 1."""

    labels: tuple
    weights: np.ndarray

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size != len(labels):
            raise DimensionMismatchError(
                f"{len(labels)} labels for weight shape {w.shape}"
            )
        if not np.isfinite(w).all() or (w < 0).any():
            raise DataError("weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > SUM_TOL:
            raise DataError(f"weights must sum to 1, got {w.sum():.12f}")
        w.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", w)

    def to_dict(self) -> dict:
        return {lab: float(w) for lab, w in zip(self.labels, self.weights)}


def priority_vector(m: PairwiseMatrix) -> PriorityVector:
    """Column-normalize then row-average the preference matrix.

    A column summing to zero (an item that never lost a comparison) carries
    no mass to distribute and is dropped from the average; at least one
    column must be positive.
    """
    sums = m.matrix.sum(axis=0)
    positive = sums > 0.0
    if not positive.any():
        raise DataError(
            f"every column sums to zero (first item {m.labels[0]!r}); "
            "no preferences were expressed"
        )
    normalized = m.matrix[:, positive] / sums[positive]
    return PriorityVector(labels=m.labels, weights=normalized.mean(axis=1))


def invert_renormalize(v: PriorityVector) -> PriorityVector:
    """Reciprocal weights renormalized to sum 1 (zero-is-best orientation)."""
    if (v.weights <= 0.0).any():
        idx = int(np.flatnonzero(v.weights <= 0.0)[0])
        raise DataError(f"cannot invert zero weight for item {v.labels[idx]!r}")
    inv = 1.0 / v.weights
    return PriorityVector(labels=v.labels, weights=inv / inv.sum())


def align_score(human: PairwiseMatrix, metric_values: dict) -> float:
    """Cosine similarity between a metric's distortion scores and the
    inverted human priority vector.

    ``metric_values`` maps item label to a nonnegative metric value; labels
    must match the matrix exactly (order-free).
    """
    if set(metric_values) != set(human.labels):
        missing = sorted(set(human.labels) - set(metric_values))
        surplus = sorted(set(metric_values) - set(human.labels))
        raise DataError(
            f"metric labels do not match matrix labels "
            f"(missing {missing}, surplus {surplus})"
        )
    vals = np.array([float(metric_values[lab]) for lab in human.labels])
    if not np.isfinite(vals).all() or (vals < 0).any():
        raise DataError("metric values must be finite and nonnegative")
    total = vals.sum()
    if total == 0.0:
        raise DataError("metric values are all zero; alignment undefined")
    u = vals / total
    w = invert_renormalize(priority_vector(human)).weights
    return float(u @ w / (np.linalg.norm(u) * np.linalg.norm(w)))


def _load_pairwise_csv(path: Path) -> PairwiseMatrix:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 3:
        raise DataError(f"{path}: need a header row plus >= 2 data rows")
    labels = [c.strip() for c in rows[0][1:]]
    matrix = []
    for row in rows[1:]:
        if row[0].strip() != labels[len(matrix)]:
            raise DataError(
                f"{path}: row label {row[0]!r} does not match header order"
            )
        matrix.append([float(c) for c in row[1:]])
    return PairwiseMatrix(labels=tuple(labels), matrix=np.array(matrix))


def load_pairwise(path) -> PairwiseMatrix:
    """Read a preference matrix from JSON {labels, matrix} or labeled CSV."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return _load_pairwise_csv(path)
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "labels" not in doc or "matrix" not in doc:
        raise DataError(f"{path}: expected JSON object with labels and matrix")
    return PairwiseMatrix(labels=tuple(doc["labels"]), matrix=np.array(doc["matrix"]))


def load_metric_values(path) -> dict:
    """Read label -> value pairs from a JSON object or two-column CSV."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, newline="") as fh:
            out = {}
            for row in csv.reader(fh):
                if len(row) != 2:
                    raise DataError(f"{path}: expected label,value rows")
                out[row[0].strip()] = float(row[1])
            return out
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise DataError(f"{path}: expected a JSON object of label: value")
    return {str(k): float(v) for k, v in doc.items()}
