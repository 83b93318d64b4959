"""Calibration of circuit parameters to momentum-fraction data.

For each z the two-equation system — reproduce z on the top wire and match
the vertex concurrence — collapses to one dimension: gamma3 follows from
gamma1 and z by inverting the z map, leaving a single residual
g(gamma1) = C_block(gamma1, gamma3(gamma1, z)) - C_vertex(z) to drive to zero.

Root finding works on the radicand difference h = C_block^2 - C_vertex^2
(same sign as g, but smooth where C_block touches zero): a deterministic zoom
scan (2001-point levels re-centred on the running minimum) brackets the first
sign change, then bisection narrows it to 1e-13 in gamma1. A flat grid would
miss the sign change near z -> 1, where the negative window of h shrinks
like the feasible interval itself (width ~2e-4 at z = 0.99). When g has
several roots the smallest-gamma1 one is returned.

Precision note: for z beyond ~0.9999 the radicand at the root is ~1e-16 and
the concurrence residual plateaus near 1e-8, the double-precision floor.

Sampling restriction: data fractions below 0.5 are reflected to 1 - z before
calibration (the block orders the harder daughter first). z = 0.5 exactly is
infeasible by contract: equal sharing has no strictly-higher-momentum
daughter to put on the top wire.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entanglement import c_circuit, c_circuit_radicand, c_qcd
from .errors import ArccosDomain, CalibrationInfeasible, EmptyDataset, OutOfRange, ParameterDomain
from .splitter import SplittingParams, gamma2_from_gamma1, z_of

BISECTION_TOL = 1e-13
SCAN_POINTS = 2001
RESIDUAL_TOL = 1e-8


def gamma1_max(z: float) -> float:
    """Largest gamma1 keeping the arccos argument of gamma3_of in range."""
    return math.acos(1.0 / (3.0 - 2.0 * z))


def gamma3_of(gamma1: float, z: float) -> float:
    """Invert the z map for gamma3 on the principal branch [0, pi]."""
    if not 0.0 <= gamma1 < math.pi / 3:
        raise ParameterDomain(f"gamma1 must be in [0, pi/3), got {gamma1}")
    arg = 2.0 * (z - 0.5) / (1.0 / math.cos(gamma1) - 2.0)
    if abs(arg) > 1.0 + 1e-12:
        raise ArccosDomain(
            f"|2(z-0.5)/(sec(g1)-2)| = {abs(arg)} > 1 (gamma1 past arccos(1/(3-2z)))"
        )
    return math.acos(min(max(arg, -1.0), 1.0))


def _gamma3_arr(gamma1: np.ndarray, z: float) -> np.ndarray:
    arg = 2.0 * (z - 0.5) / (1.0 / np.cos(gamma1) - 2.0)
    return np.arccos(np.clip(arg, -1.0, 1.0))


def matching_residual(gamma1: float, z: float) -> float:
    """g(gamma1) = block concurrence minus vertex concurrence at fixed z."""
    return c_circuit(gamma1, gamma3_of(gamma1, z)) - c_qcd(z)


def _h(gamma1: np.ndarray, z: float) -> np.ndarray:
    """Radicand difference: same sign as matching_residual, no sqrt kink."""
    return c_circuit_radicand(gamma1, _gamma3_arr(gamma1, z)) - c_qcd(z) ** 2


@dataclass(frozen=True)
class CalibrationRecord:
    z: float
    params: SplittingParams
    residual_z: float
    residual_c: float


@dataclass(frozen=True)
class ParamDistribution:
    """Calibrated records plus the entries that could not be calibrated."""

    records: tuple[CalibrationRecord, ...]
    rejected: tuple[tuple[float, str], ...]  # (z as given, reason)
    n_reflected: int
    source: str = ""


def solve_params(z: float) -> SplittingParams:
    """Parameters reproducing z and the vertex concurrence, residuals < 1e-8.

    Raises OutOfRange for z outside (0.5, 1] and CalibrationInfeasible at
    z = 0.5 exactly or if no sign change of the matching residual exists on
    the feasible gamma1 interval.
    """
    if z == 0.5:
        raise CalibrationInfeasible(
            "z = 0.5 is outside the ordered-splitting domain (no strictly "
            "higher-momentum daughter to place on the top wire)"
        )
    if not 0.5 < z <= 1.0:
        raise OutOfRange(f"z must be in (0.5, 1], got {z}")
    if z == 1.0:
        # closed-form boundary: z_of(0, pi) = 1 and both concurrences vanish
        return SplittingParams(0.0, gamma2_from_gamma1(0.0), math.pi)

    lo, hi = 0.0, gamma1_max(z)
    bracket = None
    for _ in range(8):
        grid = np.linspace(lo, hi, SCAN_POINTS)
        vals = _h(grid, z)
        neg = np.nonzero(vals < 0.0)[0]
        if len(neg):
            i = int(neg[0])
            if i == 0:
                bracket = (grid[0], grid[0])
            else:
                bracket = (grid[i - 1], grid[i])
            break
        i = int(np.argmin(vals))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, SCAN_POINTS - 1)]
        if hi - lo < BISECTION_TOL:
            break
    if bracket is None:
        raise CalibrationInfeasible(
            f"matching residual has no sign change on [0, {gamma1_max(z):.6f}] for z={z}"
        )

    a, b = bracket
    fa = float(_h(np.array([a]), z)[0])
    while b - a > BISECTION_TOL:
        m = 0.5 * (a + b)
        fm = float(_h(np.array([m]), z)[0])
        if fm == 0.0:
            a = b = m
        elif fa * fm < 0.0:
            b = m
        else:
            a, fa = m, fm
    gamma1 = float(0.5 * (a + b))
    gamma3 = gamma3_of(gamma1, z)
    return SplittingParams(gamma1, gamma2_from_gamma1(gamma1), gamma3)


def calibration_record(z: float) -> CalibrationRecord:
    """solve_params plus residual bookkeeping."""
    p = solve_params(z)
    return CalibrationRecord(
        z=z,
        params=p,
        residual_z=abs(z_of(p.gamma1, p.gamma3) - z),
        residual_c=abs(c_circuit(p.gamma1, p.gamma3) - c_qcd(z)),
    )


def calibrate_dataset(zs, source: str = "") -> ParamDistribution:
    """Per-entry calibration; z < 0.5 reflected to 1 - z, failures collected.

    Infeasible or out-of-range entries are reported with counts, never
    silently dropped.
    """
    zs = list(zs)
    if not zs:
        raise EmptyDataset("no z values to calibrate")
    records: list[CalibrationRecord] = []
    rejected: list[tuple[float, str]] = []
    n_reflected = 0
    for z_raw in zs:
        z = float(z_raw)
        if 0.0 <= z < 0.5:
            z = 1.0 - z
            n_reflected += 1
        try:
            records.append(calibration_record(z))
        except (CalibrationInfeasible, OutOfRange) as exc:
            rejected.append((float(z_raw), str(exc)))
    return ParamDistribution(tuple(records), tuple(rejected), n_reflected, source)


def solve_params_bruteforce(z: float, step: float = 1e-4) -> float | None:
    """Grid-scan oracle: first gamma1 bracketing a sign change of g, at `step`.

    Independent of the zoom solver; used to cross-check roots in tests.
    Returns the refined root or None when the scan sees no sign change.
    """
    if z == 1.0:
        return 0.0
    hi = gamma1_max(z)
    grid = np.arange(0.0, hi + step, step)
    grid = grid[grid <= hi]
    vals = np.array([c_circuit(g, gamma3_of(g, z)) - c_qcd(z) for g in grid])
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            return float(grid[i])
        if vals[i] * vals[i + 1] < 0.0:
            a, b, fa = grid[i], grid[i + 1], vals[i]
            while b - a > 1e-12:
                m = 0.5 * (a + b)
                fm = c_circuit(m, gamma3_of(m, z)) - c_qcd(z)
                if fm == 0.0:
                    return float(m)
                if fa * fm < 0.0:
                    b = m
                else:
                    a, fa = m, fm
            return float(0.5 * (a + b))
    return None
