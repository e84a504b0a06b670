"""Confusion-based classification metrics, Cohen's kappa and ROC AUC.

Undefined ratios (e.g. precision with no positive predictions) surface as
NaN markers rather than silent zeros, so downstream aggregation can report
exclusions honestly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import InvalidDataError, UndefinedMetricError

NOT_A_VALUE = float("nan")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise InvalidDataError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsReport:
    """One scored prediction set.  ``auc`` is None when never computed
    (no scores available); metric fields are NaN when undefined."""

    accuracy: float
    precision: float
    recall: float
    f1: float
    kappa: float
    counts: ConfusionCounts
    n_pos: int
    n_neg: int
    auc: float | None = None

    METRIC_FIELDS = ("accuracy", "precision", "recall", "f1", "auc", "kappa")

    def to_dict(self) -> dict:
        def scrub(v):
            if v is None or (isinstance(v, float) and math.isnan(v)):
                return None
            return v

        return {
            "accuracy": scrub(self.accuracy),
            "precision": scrub(self.precision),
            "recall": scrub(self.recall),
            "f1": scrub(self.f1),
            "auc": scrub(self.auc),
            "kappa": scrub(self.kappa),
            "counts": {"tp": self.counts.tp, "fp": self.counts.fp, "tn": self.counts.tn, "fn": self.counts.fn},
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
        }

    @staticmethod
    def from_dict(d: dict) -> "MetricsReport":
        def lift(v):
            return NOT_A_VALUE if v is None else float(v)

        counts = ConfusionCounts(**d["counts"])
        return MetricsReport(
            accuracy=lift(d["accuracy"]),
            precision=lift(d["precision"]),
            recall=lift(d["recall"]),
            f1=lift(d["f1"]),
            kappa=lift(d["kappa"]),
            counts=counts,
            n_pos=d["n_pos"],
            n_neg=d["n_neg"],
            auc=None if d.get("auc") is None else float(d["auc"]),
        )


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else NOT_A_VALUE


def confusion_counts(predictions: np.ndarray, labels: np.ndarray) -> ConfusionCounts:
    pred = np.asarray(predictions).astype(np.int64)
    y = np.asarray(labels).astype(np.int64)
    if pred.shape != y.shape or pred.ndim != 1 or pred.size == 0:
        raise InvalidDataError("predictions and labels must be equal-length, non-empty")
    if not np.all((pred == 0) | (pred == 1)) or not np.all((y == 0) | (y == 1)):
        raise InvalidDataError("predictions and labels must be binary")
    tp = int(np.sum((pred == 1) & (y == 1)))
    fp = int(np.sum((pred == 1) & (y == 0)))
    tn = int(np.sum((pred == 0) & (y == 0)))
    fn = int(np.sum((pred == 0) & (y == 1)))
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def metrics_from_counts(counts: ConfusionCounts) -> MetricsReport:
    """Accuracy, precision, recall, F1 and kappa from raw counts."""
    n = counts.total
    if n == 0:
        raise InvalidDataError("empty confusion counts")
    tp, fp, tn, fn = counts.tp, counts.fp, counts.tn, counts.fn
    accuracy = (tp + tn) / n
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    if math.isnan(precision) or math.isnan(recall) or precision + recall == 0:
        f1 = NOT_A_VALUE
    else:
        f1 = 2.0 * precision * recall / (precision + recall)

    p_o = accuracy
    p_e = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n)
    kappa = (p_o - p_e) / (1.0 - p_e) if p_e < 1.0 else NOT_A_VALUE
    return MetricsReport(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        kappa=kappa,
        counts=counts,
        n_pos=tp + fn,
        n_neg=fp + tn,
    )


def binary_metrics(predictions: np.ndarray, labels: np.ndarray) -> MetricsReport:
    """Score hard 0/1 predictions (AUC stays absent; it needs scores)."""
    return metrics_from_counts(confusion_counts(predictions, labels))


def auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Area under the ROC curve via the normalized rank-sum statistic.

    Equals (concordant pairs + 0.5 * tied pairs) / (n_pos * n_neg), which
    coincides with trapezoidal integration of the ROC curve.

    Raises:
        UndefinedMetricError: If only one class is present.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(np.int64)
    if s.shape != y.shape or s.ndim != 1:
        raise InvalidDataError("scores and labels must be equal-length vectors")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs both classes present")
    ranks = rankdata(s, method="average")
    rank_sum = float(np.sum(ranks[y == 1]))
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)
