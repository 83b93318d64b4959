import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitshower.entanglement import c_qcd, concurrence_wootters
from splitshower.errors import DivergentEndpoint, OutOfRange
from splitshower.qcd import (
    amplitude_ratio_check,
    helicity_amplitudes,
    p_gg,
    rho_sc,
    rho_sc_from_amplitudes,
)

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


def test_p_gg_midpoint():
    # C_A (1 + 1 + 0.25) at z = 0.5
    assert p_gg(0.5) == pytest.approx(6.75, abs=1e-15)


def test_p_gg_soft_enhancement():
    assert p_gg(1e-3) > p_gg(1e-2)


def test_p_gg_divergent_endpoints():
    with pytest.raises(DivergentEndpoint):
        p_gg(0.0)
    with pytest.raises(DivergentEndpoint):
        p_gg(1.0)


@given(st.floats(1e-6, 1 - 1e-6))
@settings(max_examples=100, deadline=None)
def test_p_gg_symmetry(z):
    # rel 1e-9: near the endpoints the test's own 1 - z rounding perturbs the
    # small argument by ~1e-11 relative, which p_gg passes straight through
    assert p_gg(z) == pytest.approx(p_gg(1 - z), rel=1e-9)


def test_amplitudes():
    a = helicity_amplitudes(0.3)
    assert a.l_to_ll == 1.0
    assert a.l_to_lr == pytest.approx(0.09)
    assert a.l_to_rl == pytest.approx(0.49)
    assert a.r_to_rr == a.l_to_ll
    assert a.r_to_rl == a.l_to_lr


def test_amplitude_ratio_constant():
    r1 = amplitude_ratio_check(0.3)
    assert r1 == pytest.approx(amplitude_ratio_check(0.7), abs=1e-12)
    assert amplitude_ratio_check(0.25) == pytest.approx(amplitude_ratio_check(0.5), abs=1e-12)
    assert amplitude_ratio_check(0.5) > 0
    assert r1 == pytest.approx(2.0, abs=1e-12)


def test_amplitude_ratio_out_of_range():
    with pytest.raises(OutOfRange):
        amplitude_ratio_check(0.0)


def test_rho_sc_midpoint_entries():
    rho = rho_sc(0.5).elements.real
    assert rho[0, 0] == pytest.approx(4 / 9, abs=1e-15)
    assert rho[1, 1] == pytest.approx(1 / 18, abs=1e-15)
    assert rho[1, 2] == pytest.approx(1 / 18, abs=1e-15)


@given(st.floats(1e-4, 1 - 1e-4))
@settings(max_examples=100, deadline=None)
def test_rho_sc_valid_density_matrix(z):
    rho = rho_sc(z)
    el = rho.elements
    assert abs(np.trace(el) - 1) < 1e-12
    assert np.abs(el - el.conj().T).max() < 1e-12
    assert np.linalg.eigvalsh(el).min() > -1e-10


@given(st.floats(1e-4, 1 - 1e-4))
@settings(max_examples=100, deadline=None)
def test_rho_sc_matches_amplitude_construction(z):
    direct = rho_sc(z).elements
    rebuilt = rho_sc_from_amplitudes(z).elements
    assert np.abs(direct - rebuilt).max() < 1e-14


@given(st.floats(1e-4, 1 - 1e-4))
@settings(max_examples=100, deadline=None)
def test_rho_sc_swap_reflection(z):
    lhs = rho_sc(1 - z).elements
    rhs = SWAP @ rho_sc(z).elements @ SWAP
    assert np.abs(lhs - rhs).max() < 1e-12


def test_rho_sc_out_of_range():
    with pytest.raises(OutOfRange):
        rho_sc(0.0)
    with pytest.raises(OutOfRange):
        rho_sc(1.0)


def test_wootters_grid_oracle():
    grid = np.linspace(1e-3, 1 - 1e-3, 1000)
    err = max(abs(concurrence_wootters(rho_sc(z)) - c_qcd(z)) for z in grid)
    assert err < 1e-8
