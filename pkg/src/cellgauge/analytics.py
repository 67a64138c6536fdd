"""Corpus-level aggregation: summary means, histograms, metric correlation.

Absent metric values (e.g. averages of a workbook without formulas) are
excluded from every computation rather than imputed as zero.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from statistics import fmean

from .metrics import METRIC_IDS, MetricRecord


class EmptyCorpusError(ValueError):
    pass


class NoDataError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class CorpusSummary:
    spreadsheet_count: int
    ratio_with_formulas: float
    per_metric: dict[str, float | None]


def aggregate(records: list[MetricRecord]) -> CorpusSummary:
    """Arithmetic mean per metric over the records where it is present."""
    if not records:
        raise EmptyCorpusError("no records to aggregate")
    with_formulas = sum(1 for r in records if (r.metrics["M03"] or 0) > 0)
    per_metric: dict[str, float | None] = {}
    for metric_id in METRIC_IDS:
        values = [r.metrics[metric_id] for r in records if r.metrics[metric_id] is not None]
        per_metric[metric_id] = fmean(values) if values else None
    return CorpusSummary(
        spreadsheet_count=len(records),
        ratio_with_formulas=with_formulas / len(records),
        per_metric=per_metric,
    )


@dataclass(frozen=True, slots=True)
class HistogramSpec:
    bins: int = 20
    bounds: tuple[float, float] | None = None  # None: min..max observed


@dataclass(frozen=True, slots=True)
class Histogram:
    metric_id: str
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]


# Ratio-valued metrics default to a fixed [0, 1] axis.
RATIO_METRICS = frozenset({"M04", "M06"})


def histogram(
    records: list[MetricRecord], metric_id: str, spec: HistogramSpec | None = None
) -> Histogram:
    """Bin the present values of one metric.

    Bins are half-open with the final bin right-closed; a value exactly on an
    interior edge counts in the upper bin. With fixed bounds, out-of-range
    values land in the outermost bins so that counts always sum to the number
    of present values.
    """
    values = [r.metrics[metric_id] for r in records if r.metrics[metric_id] is not None]
    if not values:
        raise NoDataError(f"no values present for {metric_id}")
    if spec is None:
        spec = HistogramSpec(bounds=(0.0, 1.0) if metric_id in RATIO_METRICS else None)
    if spec.bins < 1:
        raise ValueError("bin count must be >= 1")
    if spec.bounds is not None:
        lo, hi = spec.bounds
        if not hi > lo:
            raise ValueError("histogram range must be ascending")
    else:
        lo, hi = min(values), max(values)
        if hi <= lo:
            hi = lo + 1.0
            if hi <= lo:  # |lo| so large that +1.0 does not register
                hi = math.nextafter(lo, math.inf)
    bins = spec.bins
    edges = [lo + (hi - lo) * i / bins for i in range(bins + 1)]
    edges[0], edges[-1] = lo, hi
    if any(edges[i] <= edges[i - 1] for i in range(1, len(edges))):
        # interval too narrow for the requested bin count at this magnitude
        edges = [lo, hi]
        bins = 1
    counts = [0] * bins
    for v in values:
        idx = bisect_right(edges, v) - 1
        if idx < 0:
            idx = 0
        elif idx >= bins:
            idx = bins - 1
        counts[idx] += 1
    return Histogram(metric_id=metric_id, bin_edges=tuple(edges), counts=tuple(counts))


def pearson_xy(xs: list[float], ys: list[float]) -> float | None:
    """Pearson product-moment coefficient; None when n < 2 or variance is 0."""
    n = len(xs)
    if n != len(ys):
        raise ValueError("samples must have equal length")
    if n < 2:
        return None
    mx = fmean(xs)
    my = fmean(ys)
    sxx = syy = sxy = 0.0
    for x, y in zip(xs, ys):
        dx = x - mx
        dy = y - my
        sxx += dx * dx
        syy += dy * dy
        sxy += dx * dy
    if sxx <= 0.0 or syy <= 0.0:
        return None
    denominator = math.sqrt(sxx) * math.sqrt(syy)  # sqrt of the product underflows first
    if denominator == 0.0:
        return None
    return sxy / denominator


def _ranks(values: list[float]) -> list[float]:
    """Average ranks (1-based) with ties sharing their mean rank."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def _pairwise(records: list[MetricRecord], a: str, b: str) -> tuple[list[float], list[float]]:
    xs: list[float] = []
    ys: list[float] = []
    for r in records:
        x = r.metrics[a]
        y = r.metrics[b]
        if x is not None and y is not None:
            xs.append(x)
            ys.append(y)
    return xs, ys


def pearson(records: list[MetricRecord], metric_a: str, metric_b: str) -> tuple[float | None, int]:
    """(r, n) over the pairwise-complete observations of two metrics."""
    xs, ys = _pairwise(records, metric_a, metric_b)
    return pearson_xy(xs, ys), len(xs)


def spearman(records: list[MetricRecord], metric_a: str, metric_b: str) -> tuple[float | None, int]:
    """Rank correlation: Pearson on average ranks of the pairwise sample."""
    xs, ys = _pairwise(records, metric_a, metric_b)
    if len(xs) < 2:
        return None, len(xs)
    return pearson_xy(_ranks(xs), _ranks(ys)), len(xs)


@dataclass(frozen=True, slots=True)
class CorrelationMatrix:
    metric_ids: tuple[str, ...]
    r: tuple[tuple[float | None, ...], ...]
    n: tuple[tuple[int, ...], ...]


def correlation_matrix(
    records: list[MetricRecord],
    metric_ids: tuple[str, ...] = METRIC_IDS,
    method: str = "pearson",
) -> CorrelationMatrix:
    """Symmetric matrix of pairwise correlations with per-pair sample sizes."""
    if method == "pearson":
        corr = pearson
    elif method == "spearman":
        corr = spearman
    else:
        raise ValueError(f"unknown correlation method {method!r}")
    size = len(metric_ids)
    r_rows: list[list[float | None]] = [[None] * size for _ in range(size)]
    n_rows: list[list[int]] = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            value, count = corr(records, metric_ids[i], metric_ids[j])
            r_rows[i][j] = r_rows[j][i] = value
            n_rows[i][j] = n_rows[j][i] = count
    return CorrelationMatrix(
        metric_ids=tuple(metric_ids),
        r=tuple(tuple(row) for row in r_rows),
        n=tuple(tuple(row) for row in n_rows),
    )
