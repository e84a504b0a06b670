"""Paired statistical comparisons and mean/SD aggregation.

The signed-rank test uses an exact null distribution (dynamic program over
sign assignments, ties handled through average ranks) for up to 20 pairs
and a tie-corrected normal approximation with continuity correction above
that.  The paired t-test evaluates the Student CDF through the regularized
incomplete beta function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import betainc
from scipy.stats import rankdata

from .errors import DegenerateTestError, InvalidDataError
from .metrics import NOT_A_VALUE, MetricsReport

EXACT_LIMIT = 20


@dataclass(frozen=True)
class ComparisonResult:
    statistic: float
    p_value: float
    test_kind: str
    n_pairs: int
    dropped_zero_pairs: int = 0
    degenerate: bool = False
    method: str = "exact"


def _paired_diffs(a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    x = np.asarray(list(a), dtype=float)
    y = np.asarray(list(b), dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size == 0:
        raise InvalidDataError("paired samples must be equal-length, non-empty")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidDataError("paired samples must be finite")
    return x - y


def _exact_signed_rank_p(ranks: np.ndarray, w_min: float) -> float:
    """Two-sided exact p = min(1, 2 P(W+ <= w_min)) by enumeration.

    Ranks are averages, so doubling makes them integers; the distribution
    of W+ over all 2^n sign assignments comes from a subset-sum count.
    """
    scaled = np.rint(ranks * 2).astype(np.int64)
    total = int(scaled.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in scaled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    threshold = int(math.floor(w_min * 2 + 1e-9))
    below = counts[: threshold + 1].sum()
    return min(1.0, 2.0 * below / counts.sum())


def _approx_signed_rank_p(ranks: np.ndarray, w_min: float) -> float:
    n = ranks.size
    mu = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    # tie correction: subtract sum(t^3 - t)/48 over groups of tied |d|
    _, tie_counts = np.unique(ranks, return_counts=True)
    var -= float(np.sum(tie_counts.astype(float) ** 3 - tie_counts)) / 48.0
    if var <= 0:
        return 1.0
    z = (w_min - mu + 0.5) / math.sqrt(var)  # continuity correction
    p = 2.0 * 0.5 * math.erfc(-z / math.sqrt(2.0))
    return min(1.0, p)


def wilcoxon_signed_rank(
    a: Sequence[float], b: Sequence[float], method: str = "auto"
) -> ComparisonResult:
    """Two-sided Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped (classic convention) and reported; with
    nothing left the result is flagged degenerate with p = 1.  ``method``
    is ``"auto"`` (exact up to 20 informative pairs), ``"exact"`` or
    ``"approx"``.
    """
    d = _paired_diffs(a, b)
    nonzero = d[d != 0.0]
    dropped = d.size - nonzero.size
    if nonzero.size == 0:
        return ComparisonResult(
            statistic=0.0,
            p_value=1.0,
            test_kind="wilcoxon",
            n_pairs=0,
            dropped_zero_pairs=dropped,
            degenerate=True,
        )
    ranks = rankdata(np.abs(nonzero), method="average")
    w_plus = float(np.sum(ranks[nonzero > 0]))
    w_minus = float(np.sum(ranks[nonzero < 0]))
    w = min(w_plus, w_minus)
    if method == "auto":
        method = "exact" if nonzero.size <= EXACT_LIMIT else "approx"
    if method == "exact":
        p = _exact_signed_rank_p(ranks, w)
    elif method == "approx":
        p = _approx_signed_rank_p(ranks, w)
    else:
        raise InvalidDataError(f"unknown method {method!r}")
    return ComparisonResult(
        statistic=w,
        p_value=p,
        test_kind="wilcoxon",
        n_pairs=int(nonzero.size),
        dropped_zero_pairs=dropped,
        method=method,
    )


def student_t_sf2(t: float, dof: int) -> float:
    """Two-sided tail probability of Student's t via the incomplete beta."""
    if dof < 1:
        raise InvalidDataError("degrees of freedom must be >= 1")
    if t == 0.0:
        return 1.0
    x = dof / (dof + t * t)
    return float(betainc(dof / 2.0, 0.5, x))


def paired_t(a: Sequence[float], b: Sequence[float]) -> ComparisonResult:
    """Two-sided paired t-test.

    Raises:
        DegenerateTestError: Fewer than 2 pairs or zero difference variance.
    """
    d = _paired_diffs(a, b)
    n = d.size
    if n < 2:
        raise DegenerateTestError("paired t-test needs at least 2 pairs")
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        raise DegenerateTestError("paired differences have zero variance")
    t = float(np.mean(d)) / (sd / math.sqrt(n))
    p = student_t_sf2(t, n - 1)
    return ComparisonResult(statistic=t, p_value=p, test_kind="paired_t", n_pairs=n)


@dataclass(frozen=True)
class MetricAggregate:
    mean: float
    sd: float
    n_used: int
    n_excluded: int


def aggregate(reports: Iterable[MetricsReport]) -> dict[str, MetricAggregate]:
    """Mean and sample SD (n-1) per metric, excluding NaN/absent entries."""
    reports = list(reports)
    if not reports:
        raise InvalidDataError("nothing to aggregate")
    out: dict[str, MetricAggregate] = {}
    for name in MetricsReport.METRIC_FIELDS:
        values = []
        excluded = 0
        for r in reports:
            v = getattr(r, name)
            if v is None or math.isnan(v):
                excluded += 1
            else:
                values.append(float(v))
        if not values:
            out[name] = MetricAggregate(NOT_A_VALUE, NOT_A_VALUE, 0, excluded)
            continue
        mean = float(np.mean(values))
        sd = float(np.std(values, ddof=1)) if len(values) > 1 else NOT_A_VALUE
        out[name] = MetricAggregate(mean, sd, len(values), excluded)
    return out
