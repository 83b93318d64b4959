"""Histogram and two-sample comparison statistics.

The chi-square merges adjacent bins until every expected count (under the
pooled distribution) reaches 5, the usual validity floor; the KS statistic is
computed on the raw samples, not the binned ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBins, EmptyInput


@dataclass(frozen=True)
class Histogram:
    edges: tuple[float, ...]
    counts: tuple[int, ...]
    normalized: bool = False

    def __post_init__(self):
        if len(self.counts) != len(self.edges) - 1:
            raise DegenerateBins("need len(counts) == len(edges) - 1")
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise DegenerateBins("edges must be strictly ascending")
        if any(c < 0 for c in self.counts):
            raise DegenerateBins("counts must be nonnegative")

    def densities(self) -> np.ndarray:
        """Per-bin densities; they integrate to 1 when counts are nonzero."""
        counts = np.asarray(self.counts, dtype=float)
        widths = np.diff(np.asarray(self.edges))
        total = counts.sum()
        if total == 0:
            return np.zeros_like(counts)
        return counts / (total * widths)


def make_histogram(values, bins: int = 20, lo: float = 0.0, hi: float = 1.0) -> Histogram:
    """Uniform-bin histogram on [lo, hi]; values outside are clipped in."""
    values = np.asarray(list(values), dtype=float)
    if bins < 1:
        raise DegenerateBins(f"bins must be >= 1, got {bins}")
    if hi <= lo:
        raise DegenerateBins("hi must exceed lo")
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(np.clip(values, lo, hi), bins=edges)
    return Histogram(tuple(float(e) for e in edges), tuple(int(c) for c in counts))


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic max|F_a - F_b|."""
    a = np.sort(np.asarray(list(a), dtype=float))
    b = np.sort(np.asarray(list(b), dtype=float))
    if len(a) == 0 or len(b) == 0:
        raise EmptyInput("both samples must be nonempty")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / len(a)
    cdf_b = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.abs(cdf_a - cdf_b).max())


def ks_critical_value(alpha: float, n: int, m: int) -> float:
    """Asymptotic two-sample critical value c(alpha) sqrt((n+m)/(nm))."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    c = math.sqrt(-math.log(alpha / 2.0) / 2.0)
    return c * math.sqrt((n + m) / (n * m))


def _merge_bins(counts_a: np.ndarray, counts_b: np.ndarray, min_expected: float):
    """Merge adjacent bins until pooled expected counts reach min_expected."""
    total_a, total_b = counts_a.sum(), counts_b.sum()
    total = total_a + total_b
    merged_a, merged_b = [], []
    acc_a = acc_b = 0.0
    for ca, cb in zip(counts_a, counts_b):
        acc_a += ca
        acc_b += cb
        pooled = acc_a + acc_b
        if total > 0 and (total_a * pooled / total >= min_expected and total_b * pooled / total >= min_expected):
            merged_a.append(acc_a)
            merged_b.append(acc_b)
            acc_a = acc_b = 0.0
    if acc_a or acc_b:
        if merged_a:
            merged_a[-1] += acc_a
            merged_b[-1] += acc_b
        else:
            merged_a.append(acc_a)
            merged_b.append(acc_b)
    return np.asarray(merged_a), np.asarray(merged_b)


def chi_square(counts_a, counts_b, min_expected: float = 5.0) -> tuple[float, int]:
    """Pearson chi-square over shared bins, (statistic, merged bin count).

    Expected counts come from the pooled distribution; bins below the
    expected-count floor are merged with their right neighbours first.
    """
    counts_a = np.asarray(list(counts_a), dtype=float)
    counts_b = np.asarray(list(counts_b), dtype=float)
    if counts_a.shape != counts_b.shape:
        raise DegenerateBins("histograms must share binning")
    total_a, total_b = counts_a.sum(), counts_b.sum()
    if total_a == 0 or total_b == 0:
        raise DegenerateBins("both histograms must contain entries")
    a, b = _merge_bins(counts_a, counts_b, min_expected)
    if len(a) == 0:
        raise DegenerateBins("no bins left after merging")
    total = total_a + total_b
    stat = 0.0
    for ca, cb in zip(a, b):
        pooled = ca + cb
        if pooled == 0:
            continue
        ea = total_a * pooled / total
        eb = total_b * pooled / total
        stat += (ca - ea) ** 2 / ea + (cb - eb) ** 2 / eb
    return float(stat), int(len(a))


@dataclass(frozen=True)
class CompareReport:
    ks_statistic: float
    chi2: float
    n_bins: int
    samples_a: int
    samples_b: int


def compare_samples(a, b, bins: int = 20, lo: float = 0.0, hi: float = 1.0) -> CompareReport:
    """KS on the raw samples plus chi-square on aligned histograms."""
    a = list(a)
    b = list(b)
    if not a or not b:
        raise EmptyInput("both samples must be nonempty")
    ks = ks_statistic(a, b)
    ha = make_histogram(a, bins, lo, hi)
    hb = make_histogram(b, bins, lo, hi)
    chi2, n_bins = chi_square(ha.counts, hb.counts)
    return CompareReport(ks, chi2, n_bins, len(a), len(b))
