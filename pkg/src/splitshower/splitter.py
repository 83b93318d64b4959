"""The two-qubit splitting block and its multi-prong compositions.

A single block maps |00> to a state whose sigma3 expectations on the top and
bottom wires are z and 1-z, where z = z_of(gamma1, gamma3), provided gamma2
satisfies 2 cos(gamma1) sin^2(gamma2/2) = 1. Blocks chain into shower
topologies through CNOTs that copy the parent wire onto the bottom wire of
the next block:

  TwoProng        block on wires 0-1; prongs (z, 1-z) on (0, 1).
  ThreeDominant   block 1 on wires 2-3, CNOT 2->1, block 2 on wires 0-1;
                  prongs (zz', z(1-z'), 1-z) on (0, 1, 3); wire 2 carries z.
  ThreeSecondary  block 1 on wires 0-1, CNOT 1->3, block 2 on wires 2-3;
                  prongs (z, (1-z)z', (1-z)(1-z')) on (0, 2, 3); wire 1
                  carries 1-z. The softer daughter splits again.
  FourBalanced    block 1 on wires 2-3, CNOTs 2->1 and 3->5, blocks on 0-1
                  and 4-5; prongs on (0, 1, 4, 5); wires 2, 3 carry z1, 1-z1.
  FourDominant    block 1 on wires 4-5, CNOT 4->3, block 2 on wires 2-3,
                  CNOT 2->1, block 3 on wires 0-1; prongs on (0, 1, 3, 5);
                  wires 4, 2 carry z1, z1z2.

The chaining CNOTs use a filled (state-1) control; anti-controls appear only
inside the block itself. Wire layouts are frozen exactly as listed above,
with the unmeasured ancilla wires kept in place.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import qsim
from .entanglement import GAMMA1_MAX, c_qcd, concurrence_wootters
from .errors import ParameterDomain, TopologyParamMismatch
from .qsim import Circuit, DensityMatrix, cnot, ry, u3

CONSTRAINT_TOL = 1e-10


def gamma2_from_gamma1(gamma1: float) -> float:
    """Solve 2 cos(gamma1) sin^2(gamma2/2) = 1 on the branch [pi/2, pi]."""
    if not 0.0 <= gamma1 <= GAMMA1_MAX + 1e-12:
        raise ParameterDomain(f"gamma1 must be in [0, pi/3], got {gamma1}")
    s = 1.0 / (2.0 * math.cos(gamma1))
    if s > 1.0 + 1e-9:
        raise ParameterDomain(f"no gamma2 satisfies the constraint at gamma1={gamma1}")
    return 2.0 * math.asin(math.sqrt(min(s, 1.0)))


def z_of(gamma1: float, gamma3: float) -> float:
    """Momentum fraction encoded on the top wire: (1 + cos(g3)(sec(g1) - 2))/2."""
    if not 0.0 <= gamma1 <= GAMMA1_MAX + 1e-12:
        raise ParameterDomain(f"gamma1 must be in [0, pi/3], got {gamma1}")
    return 0.5 * (1.0 + math.cos(gamma3) * (1.0 / math.cos(gamma1) - 2.0))


def xi(gamma1: float, gamma3: float) -> float:
    """Off-diagonal kernel of the block's reduced states."""
    return (
        0.5
        * math.sqrt(max(2.0 * math.cos(gamma1) - 1.0, 0.0))
        / math.cos(gamma1)
        * math.cos((gamma1 - gamma3) / 2.0)
    )


@dataclass(frozen=True)
class SplittingParams:
    """One calibrated splitting: (gamma1, gamma2, gamma3) in radians."""

    gamma1: float
    gamma2: float
    gamma3: float

    def __post_init__(self):
        if not 0.0 <= self.gamma1 <= GAMMA1_MAX + 1e-12:
            raise ParameterDomain(f"gamma1 must be in [0, pi/3], got {self.gamma1}")
        residual = 2.0 * math.cos(self.gamma1) * math.sin(self.gamma2 / 2.0) ** 2 - 1.0
        if abs(residual) > CONSTRAINT_TOL:
            raise ParameterDomain(
                f"gamma2 violates 2 cos(g1) sin^2(g2/2) = 1 by {residual:.2e}"
            )
        z = z_of(self.gamma1, self.gamma3)
        if not -1e-12 <= z <= 1.0 + 1e-12:
            raise ParameterDomain(f"parameters encode z={z} outside [0, 1]")

    @classmethod
    def from_angles(cls, gamma1: float, gamma3: float) -> SplittingParams:
        """Fill in gamma2 from the constraint."""
        return cls(gamma1, gamma2_from_gamma1(gamma1), gamma3)

    @property
    def z(self) -> float:
        return z_of(self.gamma1, self.gamma3)


class TopologyKind(Enum):
    TWO_PRONG = "TwoProng"
    THREE_DOMINANT = "ThreeDominant"
    THREE_SECONDARY = "ThreeSecondary"
    FOUR_BALANCED = "FourBalanced"
    FOUR_DOMINANT = "FourDominant"


# (n_qubits, n_splittings, prong wires, intermediate wires)
_TOPOLOGY_LAYOUT = {
    TopologyKind.TWO_PRONG: (2, 1, (0, 1), ()),
    TopologyKind.THREE_DOMINANT: (4, 2, (0, 1, 3), (2,)),
    TopologyKind.THREE_SECONDARY: (4, 2, (0, 2, 3), (1,)),
    TopologyKind.FOUR_BALANCED: (6, 3, (0, 1, 4, 5), (2, 3)),
    TopologyKind.FOUR_DOMINANT: (6, 3, (0, 1, 3, 5), (2, 4)),
}


def n_splittings(kind: TopologyKind) -> int:
    return _TOPOLOGY_LAYOUT[kind][1]


def prong_wires(kind: TopologyKind) -> tuple[int, ...]:
    return _TOPOLOGY_LAYOUT[kind][2]


@dataclass(frozen=True)
class ShowerTopology:
    """A topology kind plus its splitting parameters in splitting order."""

    kind: TopologyKind
    params: tuple[SplittingParams, ...]

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        expected = _TOPOLOGY_LAYOUT[self.kind][1]
        if len(self.params) != expected:
            raise TopologyParamMismatch(
                f"{self.kind.value} takes {expected} splittings, got {len(self.params)}"
            )

    @property
    def n_qubits(self) -> int:
        return _TOPOLOGY_LAYOUT[self.kind][0]

    @property
    def prong_wires(self) -> tuple[int, ...]:
        return _TOPOLOGY_LAYOUT[self.kind][2]

    @property
    def intermediate_wires(self) -> tuple[int, ...]:
        return _TOPOLOGY_LAYOUT[self.kind][3]

    def expected_fractions(self) -> tuple[float, ...]:
        """Exact prong fractions, in prong-wire order."""
        zs = [p.z for p in self.params]
        k = self.kind
        if k is TopologyKind.TWO_PRONG:
            (z1,) = zs
            return (z1, 1.0 - z1)
        if k is TopologyKind.THREE_DOMINANT:
            z1, z2 = zs
            return (z1 * z2, z1 * (1.0 - z2), 1.0 - z1)
        if k is TopologyKind.THREE_SECONDARY:
            z1, z2 = zs
            return (z1, (1.0 - z1) * z2, (1.0 - z1) * (1.0 - z2))
        if k is TopologyKind.FOUR_BALANCED:
            z1, z2, z3 = zs
            return (z1 * z2, z1 * (1.0 - z2), (1.0 - z1) * z3, (1.0 - z1) * (1.0 - z3))
        z1, z2, z3 = zs
        return (z1 * z2 * z3, z1 * z2 * (1.0 - z3), z1 * (1.0 - z2), 1.0 - z1)


def block_ops(p: SplittingParams, top: int, bottom: int) -> tuple[qsim.GateOp, ...]:
    """Gate sequence of one splitting block on the given wire pair."""
    return (
        ry(p.gamma2, top),
        u3(p.gamma1, 0.0, math.pi / 2.0, bottom),
        qsim.ControlledGate(ry(p.gamma3 - p.gamma1, bottom), control=top, control_state=0),
        cnot(control=bottom, target=top, control_state=0),
    )


def build_block(p: SplittingParams) -> Circuit:
    """Two-qubit splitting block on wires 0 (top) and 1 (bottom)."""
    return Circuit(2, block_ops(p, 0, 1), measured_wires=(0, 1))


def build_topology(t: ShowerTopology, include_intermediate: bool = False) -> Circuit:
    """Circuit for a shower topology, wires laid out as in the module docstring.

    measured_wires defaults to the final-prong wires; include_intermediate
    adds the ancilla wires that carry upstream splitting fractions.
    """
    k = t.kind
    p = t.params
    if k is TopologyKind.TWO_PRONG:
        ops = block_ops(p[0], 0, 1)
    elif k is TopologyKind.THREE_DOMINANT:
        ops = block_ops(p[0], 2, 3) + (cnot(2, 1),) + block_ops(p[1], 0, 1)
    elif k is TopologyKind.THREE_SECONDARY:
        ops = block_ops(p[0], 0, 1) + (cnot(1, 3),) + block_ops(p[1], 2, 3)
    elif k is TopologyKind.FOUR_BALANCED:
        ops = (
            block_ops(p[0], 2, 3)
            + (cnot(2, 1), cnot(3, 5))
            + block_ops(p[1], 0, 1)
            + block_ops(p[2], 4, 5)
        )
    else:  # FOUR_DOMINANT
        ops = (
            block_ops(p[0], 4, 5)
            + (cnot(4, 3),)
            + block_ops(p[1], 2, 3)
            + (cnot(2, 1),)
            + block_ops(p[2], 0, 1)
        )
    measured = t.prong_wires + (t.intermediate_wires if include_intermediate else ())
    return Circuit(t.n_qubits, ops, measured_wires=tuple(sorted(measured)))


def simulate_fractions(t: ShowerTopology) -> tuple[float, ...]:
    """Exact sigma3 expectations on the prong wires."""
    state = qsim.run(build_topology(t))
    return tuple(qsim.expect_sigma3(state, w) for w in t.prong_wires)


def predicted_reduced_ab(z: float, p2: SplittingParams) -> tuple[DensityMatrix, DensityMatrix]:
    """Closed-form one-qubit reduced states after a second block fed with z.

    z is the fraction from the first splitting; p2 parameterizes the second
    block. The diagonals hold exactly for any z. The off-diagonals (xi for
    the top qubit, xi mirrored for the bottom one) are the closed forms
    derived for a |00> input: the top qubit's is exact, the bottom qubit's
    holds in the z -> 1 limit (exact simulation scales it by z).
    """
    if not 0.0 <= z <= 1.0:
        raise ParameterDomain(f"z must be in [0, 1], got {z}")
    sec = 1.0 / math.cos(p2.gamma1)
    k = (sec - 2.0) * math.cos(p2.gamma3)
    off_a = xi(p2.gamma1, p2.gamma3)
    off_b = xi(p2.gamma1, math.pi - p2.gamma3)
    rho_a = np.array(
        [
            [0.5 * (1.0 + 0.5 * z * (1.0 + k)), off_a],
            [off_a, 0.5 * (1.0 - 0.5 * z * (1.0 + k))],
        ]
    )
    rho_b = np.array(
        [
            [0.5 * (1.0 + 0.5 * z * (1.0 - k)), off_b],
            [off_b, 0.5 * (1.0 - 0.5 * z * (1.0 - k))],
        ]
    )
    return DensityMatrix(1, rho_a), DensityMatrix(1, rho_b)


def predicted_reduced_single(p: SplittingParams) -> tuple[DensityMatrix, DensityMatrix]:
    """Closed-form one-qubit reduced states of a single block on |00>."""
    z = p.z
    off_a = xi(p.gamma1, p.gamma3)
    off_b = xi(p.gamma1, math.pi - p.gamma3)
    rho_a = np.array([[0.5 + 0.5 * z, off_a], [off_a, 0.5 - 0.5 * z]])
    rho_b = np.array([[1.0 - 0.5 * z, off_b], [off_b, 0.5 * z]])
    return DensityMatrix(1, rho_a), DensityMatrix(1, rho_b)


def composed_concurrence_scan(
    z_first: float, z_prime_grid, solve=None
) -> list[tuple[float, float]]:
    """Concurrence of the top two qubits of ThreeDominant across second splittings.

    Calibrates the first splitting to z_first and each grid point to z', builds
    the composed circuit, partial-traces to wires 0-1, and applies the
    mixed-state concurrence. Returns (z', concurrence) pairs for comparison
    against c_qcd(z').
    """
    if solve is None:
        from .calibrate import solve_params

        solve = solve_params
    p1 = solve(z_first)
    out = []
    for zp in z_prime_grid:
        p2 = solve(float(zp))
        t = ShowerTopology(TopologyKind.THREE_DOMINANT, (p1, p2))
        state = qsim.run(build_topology(t))
        rho_ab = qsim.partial_trace(qsim.to_density(state), [0, 1])
        out.append((float(zp), concurrence_wootters(rho_ab)))
    return out


def scan_relative_deviation(scan: list[tuple[float, float]]) -> float:
    """Max |C - c_qcd(z')| / c_qcd(z') over a scan."""
    return max(abs(c - c_qcd(zp)) / c_qcd(zp) for zp, c in scan)
