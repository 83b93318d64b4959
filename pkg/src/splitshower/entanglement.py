"""Concurrence calculators.

Four routes to the same entanglement monotone:

* c_qcd(z)            -- closed form for the gluon splitting vertex,
* c_circuit(g1, g3)   -- closed form for the two-qubit splitting block,
* concurrence_pure    -- 2*sqrt(det rho_A) for a pure two-qubit state,
* concurrence_wootters -- the general mixed-state construction.

Negative radicands within 1e-10 of zero are clamped before square roots; the
closed forms sit exactly at zero on the z -> 0, 1 boundaries and floating
point can land a hair below.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InvalidDensityMatrix, OutOfRange, ParameterDomain
from .qsim import DensityMatrix

GAMMA1_MAX = math.pi / 3

RADICAND_SLACK = 1e-10

# sigma_y (x) sigma_y is real: the i factors cancel pairwise.
_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]])).real


def _clamped_sqrt(radicand: float, context: str) -> float:
    if radicand < -RADICAND_SLACK:
        raise ParameterDomain(f"{context}: radicand {radicand} is significantly negative")
    return math.sqrt(max(radicand, 0.0))


def c_qcd(z: float) -> float:
    """Concurrence of the gluon splitting vertex: (z(1-z)/(1-z(1-z)))^2."""
    if not 0.0 <= z <= 1.0:
        raise OutOfRange(f"z must be in [0, 1], got {z}")
    u = z * (1.0 - z)
    return (u / (1.0 - u)) ** 2


def c_circuit(gamma1: float, gamma3: float) -> float:
    """Concurrence of the splitting block, trigonometric closed form.

    Requires gamma1 in [0, pi/3] (so that 2 cos(gamma1) - 1 >= 0 and the
    momentum-conservation constraint on gamma2 is solvable).
    """
    if not 0.0 <= gamma1 <= GAMMA1_MAX + 1e-12:
        raise ParameterDomain(f"gamma1 must be in [0, pi/3], got {gamma1}")
    return _clamped_sqrt(c_circuit_radicand(gamma1, gamma3), "c_circuit")


def c_circuit_radicand(gamma1, gamma3):
    """Square of the block concurrence; vectorizes over numpy inputs."""
    sec = 1.0 / np.cos(gamma1)
    return (
        0.75
        - 0.25 * (sec - 2.0) ** 2 * np.cos(gamma3) ** 2
        + 0.5 * (sec - 2.0) * sec * (np.sin(gamma1) * np.sin(gamma3) + 1.0)
    )


def concurrence_pure(rho_a: DensityMatrix) -> float:
    """Concurrence of a pure two-qubit state from one reduced qubit.

    rho_a must be the 2x2 partial trace of a pure two-qubit state; returns
    2*sqrt(det rho_a), clamped to [0, 1].
    """
    if rho_a.n_qubits != 1:
        raise InvalidDensityMatrix("concurrence_pure expects a one-qubit reduced state")
    rho_a.validate()
    det = np.linalg.det(rho_a.elements).real
    return min(2.0 * _clamped_sqrt(det, "concurrence_pure"), 1.0)


def concurrence_wootters(rho: DensityMatrix) -> float:
    """Concurrence of a general two-qubit state.

    max(0, l1 - l2 - l3 - l4) where the l_i are the decreasing square roots
    of the eigenvalues of rho.(sy(x)sy).rho*.(sy(x)sy). The eigenvalue roots
    are taken as the singular values of B = sqrt(rho).(sy(x)sy).conj(sqrt(rho)):
    the symmetrized product is B.B^H, and the SVD keeps full precision on the
    near-zero values that plain eigvalsh-then-sqrt would blur to ~1e-8.
    """
    if rho.n_qubits != 2:
        raise InvalidDensityMatrix("concurrence_wootters expects a two-qubit state")
    rho.validate()
    evals, evecs = np.linalg.eigh(rho.elements)
    sqrt_rho = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
    b = sqrt_rho @ _YY @ sqrt_rho.conj()
    lam = np.linalg.svd(b, compute_uv=False)
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))
