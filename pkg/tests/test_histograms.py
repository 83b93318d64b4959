import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitshower.errors import DegenerateBins, EmptyInput
from splitshower.histograms import (
    Histogram,
    chi_square,
    compare_samples,
    ks_critical_value,
    ks_statistic,
    make_histogram,
)


def test_histogram_validation():
    with pytest.raises(DegenerateBins):
        Histogram((0.0, 1.0), (1, 2))
    with pytest.raises(DegenerateBins):
        Histogram((0.0, 0.0, 1.0), (1, 2))
    with pytest.raises(DegenerateBins):
        Histogram((0.0, 0.5, 1.0), (1, -2))


def test_densities_integrate_to_one():
    h = make_histogram([0.1, 0.2, 0.6, 0.9, 0.95], bins=10)
    widths = np.diff(h.edges)
    assert float((h.densities() * widths).sum()) == pytest.approx(1.0, abs=1e-9)


def test_make_histogram_clips_out_of_range():
    h = make_histogram([-0.5, 0.5, 1.5], bins=2)
    assert sum(h.counts) == 3


def test_ks_identical_samples_zero():
    xs = [0.1, 0.4, 0.4, 0.8]
    assert ks_statistic(xs, xs) == 0.0


def test_ks_disjoint_point_masses_one():
    assert ks_statistic([0.2] * 10, [0.8] * 7) == 1.0


def test_ks_half_shifted():
    assert ks_statistic([0.0, 1.0], [1.0, 2.0]) == pytest.approx(0.5)


def test_ks_empty_input():
    with pytest.raises(EmptyInput):
        ks_statistic([], [1.0])


@given(
    st.lists(st.floats(0, 1), min_size=1, max_size=50),
    st.lists(st.floats(0, 1), min_size=1, max_size=50),
)
@settings(max_examples=100, deadline=None)
def test_ks_bounds_and_symmetry(a, b):
    d = ks_statistic(a, b)
    assert 0.0 <= d <= 1.0
    assert d == pytest.approx(ks_statistic(b, a), abs=1e-15)


def test_ks_critical_value_formula():
    # c(0.01) = sqrt(-ln(0.005)/2) ~ 1.6276
    crit = ks_critical_value(0.01, 500, 500)
    assert crit == pytest.approx(1.6276 * np.sqrt(1000 / 250000), abs=1e-3)


def test_chi_square_identical_zero():
    counts = [5, 10, 20, 10, 5]
    stat, bins = chi_square(counts, counts)
    assert stat == 0.0
    assert bins >= 1


def test_chi_square_merges_sparse_bins():
    a = [1, 1, 1, 1, 100]
    b = [1, 1, 1, 1, 100]
    stat, bins = chi_square(a, b, min_expected=5.0)
    assert stat == 0.0
    assert bins < 5  # sparse leading bins merged


def test_chi_square_detects_shift():
    a = [100, 0, 0]
    b = [0, 0, 100]
    stat, _ = chi_square(a, b)
    assert stat > 50


def test_chi_square_requires_entries():
    with pytest.raises(DegenerateBins):
        chi_square([0, 0], [1, 2])


def test_compare_samples_self():
    xs = list(np.linspace(0.05, 0.95, 40))
    report = compare_samples(xs, xs)
    assert report.ks_statistic == 0.0
    assert report.chi2 == 0.0
    assert report.samples_a == report.samples_b == 40


def test_compare_samples_disjoint():
    report = compare_samples([0.1] * 30, [0.9] * 30)
    assert report.ks_statistic == 1.0
    assert report.chi2 > 0.0
