"""Closed-form QCD oracles for the g -> gg vertex.

The splitting function, the reduced helicity amplitudes, and the two-qubit
spin density matrix over outgoing helicities (colour traced out). Amplitudes
are stored with the common prefactor stripped, since only ratios enter the
normalized density matrix. C_A is fixed to 3 (SU(3)).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergentEndpoint, OutOfRange
from .qsim import DensityMatrix

C_A = 3.0


def _check_open_interval(z: float) -> None:
    if not 0.0 < z < 1.0:
        raise OutOfRange(f"z must be in (0, 1), got {z}")


def p_gg(z: float) -> float:
    """Gluon splitting function C_A (z/(1-z) + (1-z)/z + z(1-z))."""
    if z in (0.0, 1.0):
        raise DivergentEndpoint("p_gg diverges at z = 0 and z = 1")
    _check_open_interval(z)
    return C_A * (z / (1.0 - z) + (1.0 - z) / z + z * (1.0 - z))


@dataclass(frozen=True)
class HelicityAmplitudes:
    """Reduced amplitudes, in units of the common prefactor sqrt(2) g f^abc E theta.

    Only three are independent; parity partners (L <-> R everywhere) are equal.
    """

    z: float
    l_to_ll: float
    l_to_lr: float
    l_to_rl: float

    @property
    def r_to_rr(self) -> float:
        return self.l_to_ll

    @property
    def r_to_rl(self) -> float:
        return self.l_to_lr

    @property
    def r_to_lr(self) -> float:
        return self.l_to_rl


def helicity_amplitudes(z: float) -> HelicityAmplitudes:
    """Nonzero reduced amplitudes: (L->LL, L->LR, L->RL) = (1, z^2, (1-z)^2)."""
    _check_open_interval(z)
    return HelicityAmplitudes(z, 1.0, z**2, (1.0 - z) ** 2)


def amplitude_vectors(z: float) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude vectors over the (LL, LR, RL, RR) basis for each initial helicity."""
    a = helicity_amplitudes(z)
    v_l = np.array([a.l_to_ll, a.l_to_lr, a.l_to_rl, 0.0])
    v_r = np.array([0.0, a.r_to_lr, a.r_to_rl, a.r_to_rr])
    return v_l, v_r


def rho_sc(z: float) -> DensityMatrix:
    """Spin density matrix of the splitting, normalized to unit trace.

    Basis order (LL, LR, RL, RR) with L on the |0> qubit state; the matrix is
    real symmetric with normalization 1/(2(z^4 + (1-z)^4 + 1)).
    """
    _check_open_interval(z)
    a = z**2
    b = (1.0 - z) ** 2
    d = z**4 + (1.0 - z) ** 4
    m = np.array(
        [
            [1.0, a, b, 0.0],
            [a, d, 2.0 * a * b, b],
            [b, 2.0 * a * b, d, a],
            [0.0, b, a, 1.0],
        ]
    )
    return DensityMatrix(2, m / (2.0 * (d + 1.0)))


def rho_sc_from_amplitudes(z: float) -> DensityMatrix:
    """Spin density matrix rebuilt from the amplitude vectors (test oracle).

    Sums the rank-1 outer products over initial helicities and normalizes;
    must reproduce rho_sc exactly.
    """
    v_l, v_r = amplitude_vectors(z)
    m = np.outer(v_l, v_l) + np.outer(v_r, v_r)
    return DensityMatrix(2, m / np.trace(m))


def amplitude_ratio_check(z: float) -> float:
    """Ratio of the summed |amplitude|^2 to the splitting-function kernel.

    Computes (1 + z^4 + (1-z)^4)/(z(1-z)) from the amplitudes and divides by
    p_gg(z)/C_A; the ratio is the constant 2 for every z, which pins the
    amplitude normalization against the splitting function.
    """
    a = helicity_amplitudes(z)
    summed = a.l_to_ll**2 + a.l_to_lr**2 + a.l_to_rl**2  # one initial helicity
    return (summed / (z * (1.0 - z))) / (p_gg(z) / C_A)
