"""Shot-noise and hardware-imperfection emulation with readout recovery.

Noisy execution evolves the full density matrix, applying a two-qubit
depolarizing channel after every two-qubit gate (the pair's state is replaced
by maximally mixed with probability twoqubit_depol), then samples bitstrings
from the diagonal and flips each readout bit with p01 (true 0 read as 1) or
p10 (true 1 read as 0). Each run draws from its own substream seeded by
(seed, run_index), so batches are reproducible run by run and safe to fan
out.

Fraction recovery reads the chain of high-side wires, whose expectations sit
closest to 1 and are therefore least likely to be pushed negative by noise:

  TwoProng        z from wire 0; fractions (z, 1-z)
  ThreeDominant   z1 from wire 2, z1z2 from wire 0;
                  fractions (z1z2, z1-z1z2, 1-z1)
  ThreeSecondary  z1 from wire 0, w=(1-z1)z2 from wire 2;
                  fractions (z1, w, 1-z1-w)
  FourBalanced    z1 from wire 2, z1z2 from wire 0, w=(1-z1)z3 from wire 4;
                  fractions (z1z2, z1-z1z2, w, 1-z1-w)
  FourDominant    z1 from wire 4, z1z2 from wire 2, z1z2z3 from wire 0;
                  fractions (z1z2z3, z1z2-z1z2z3, z1-z1z2, 1-z1)

A run whose derived fractions contain a negative entry is rejected (a value,
not an error). The optional sigma shift adds one binomial standard error
sqrt(p(1-p)/shots) of each wire's ground-state probability to that wire's
estimator before the complements are derived, then clamps negatives to zero
and renormalizes the fractions to sum to 1. raw_mode instead reads every
prong wire directly, with no derivation and no shift.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qsim
from .errors import TooManyQubits, ZeroShots
from .qsim import Circuit, ControlledGate, DensityMatrix, StateVector
from .splitter import ShowerTopology, TopologyKind, build_topology


@dataclass(frozen=True)
class NoiseModel:
    """Readout flip probabilities per qubit and depolarizing per two-qubit gate.

    Readout rates stay below 0.5 (a flip rate past that is a relabeling);
    the depolarizing probability may go all the way to 1, the fully-mixed
    limit.
    """

    readout_p01: float = 0.02
    readout_p10: float = 0.02
    twoqubit_depol: float = 0.01

    def __post_init__(self):
        for name in ("readout_p01", "readout_p10"):
            v = getattr(self, name)
            if not 0.0 <= v < 0.5:
                raise ValueError(f"{name} must be in [0, 0.5), got {v}")
        if not 0.0 <= self.twoqubit_depol <= 1.0:
            raise ValueError(f"twoqubit_depol must be in [0, 1], got {self.twoqubit_depol}")


IDEAL = NoiseModel(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class RunBatch:
    runs: int
    shots_per_run: int
    seed: int

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.shots_per_run < 1:
            raise ZeroShots(f"shots_per_run must be >= 1, got {self.shots_per_run}")


def _depolarize_pair(rho: np.ndarray, wires: tuple[int, int], p: float, n: int) -> np.ndarray:
    """(1-p) rho + p (I/4 on the pair (x) reduced rest), in wire order."""
    keep = [w for w in range(n) if w not in wires]
    dm = DensityMatrix(n, rho)
    if keep:
        reduced = qsim.partial_trace(dm, keep).elements
    else:
        reduced = np.array([[1.0 + 0.0j]])
    mixed = np.kron(reduced, np.eye(4, dtype=complex) / 4.0)
    # permute kron order (keep..., pair...) into ascending wire order
    order = keep + sorted(wires)
    t = mixed.reshape([2] * (2 * n))
    perm = [0] * n
    for pos, w in enumerate(order):
        perm[w] = pos
    t = t.transpose(perm + [q + n for q in perm])
    return (1.0 - p) * rho + p * t.reshape(rho.shape)


def evolve_density(circuit: Circuit, model: NoiseModel) -> DensityMatrix:
    """Density-matrix evolution with depolarizing after each two-qubit gate."""
    if circuit.n_qubits > qsim.MAX_QUBITS:
        raise TooManyQubits(f"max {qsim.MAX_QUBITS} qubits, got {circuit.n_qubits}")
    n = circuit.n_qubits
    rho = qsim.to_density(StateVector.zero(n)).elements.copy()
    for op in circuit.ops:
        u = qsim.embed(op, n)
        rho = u @ rho @ u.conj().T
        if isinstance(op, ControlledGate) and model.twoqubit_depol > 0.0:
            rho = _depolarize_pair(rho, tuple(sorted(op.wires)), model.twoqubit_depol, n)
    return DensityMatrix(n, rho)


def sample_with_readout(
    probs: np.ndarray, shots: int, rng: np.random.Generator, model: NoiseModel, n: int
) -> dict[str, int]:
    """Draw bitstrings from probs, then flip each bit with its readout rate."""
    idx = rng.choice(len(probs), size=shots, p=probs)
    bits = ((idx[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int8)
    if model.readout_p01 > 0.0 or model.readout_p10 > 0.0:
        u = rng.random(bits.shape)
        flip = np.where(bits == 0, u < model.readout_p01, u < model.readout_p10)
        bits = bits ^ flip
    observed = (bits << np.arange(n - 1, -1, -1)).sum(axis=1)
    counts = np.bincount(observed, minlength=len(probs))
    return {qsim.bitstring(i, n): int(c) for i, c in enumerate(counts) if c > 0}


def circuit_probabilities(circuit: Circuit, model: NoiseModel) -> np.ndarray:
    """Computational-basis probabilities before readout error.

    Noiseless models run the statevector; otherwise the density matrix is
    evolved with the depolarizing channel.
    """
    if model.twoqubit_depol == 0.0:
        return qsim.run(circuit).probabilities()
    rho = evolve_density(circuit, model)
    probs = np.clip(np.diag(rho.elements).real, 0.0, None)
    return probs / probs.sum()


def noisy_sample(circuit: Circuit, model: NoiseModel, batch: RunBatch) -> list[dict[str, int]]:
    """Per-run counts over full bitstrings; run r uses stream (seed, r)."""
    if circuit.n_qubits > qsim.MAX_QUBITS:
        raise TooManyQubits(f"max {qsim.MAX_QUBITS} qubits, got {circuit.n_qubits}")
    probs = circuit_probabilities(circuit, model)
    out = []
    for r in range(batch.runs):
        rng = np.random.default_rng([batch.seed, r])
        out.append(sample_with_readout(probs, batch.shots_per_run, rng, model, circuit.n_qubits))
    return out


@dataclass(frozen=True)
class Rejected:
    """A run excluded as unphysical (some derived fraction was negative)."""

    reason: str


@dataclass(frozen=True)
class ProngFractions:
    """Momentum fractions of the final prongs.

    final is sorted descending; natural keeps derivation order (the
    prong-wire order of the topology); intermediate carries upstream chain
    fractions when available; estimators holds (wire, p_hat_ground) pairs for
    the high-side wires so the sigma shift can be applied afterwards.
    """

    final: tuple[float, ...]
    natural: tuple[float, ...]
    intermediate: tuple[float, ...] = ()
    estimators: tuple[tuple[int, float], ...] = ()
    topology_kind: TopologyKind | None = None

    @classmethod
    def from_natural(cls, natural, intermediate=(), estimators=(), topology_kind=None):
        return cls(
            final=tuple(sorted(natural, reverse=True)),
            natural=tuple(natural),
            intermediate=tuple(intermediate),
            estimators=tuple(estimators),
            topology_kind=topology_kind,
        )


# high-side chain wires per topology, in the order used by _derive_fractions
_CHAIN_WIRES = {
    TopologyKind.TWO_PRONG: (0,),
    TopologyKind.THREE_DOMINANT: (2, 0),
    TopologyKind.THREE_SECONDARY: (0, 2),
    TopologyKind.FOUR_BALANCED: (2, 0, 4),
    TopologyKind.FOUR_DOMINANT: (4, 2, 0),
}


def _derive_fractions(kind: TopologyKind, est: dict[int, float]) -> tuple[float, ...]:
    """Fractions in prong-wire order from the chain estimators."""
    if kind is TopologyKind.TWO_PRONG:
        z1 = est[0]
        return (z1, 1.0 - z1)
    if kind is TopologyKind.THREE_DOMINANT:
        z1, z12 = est[2], est[0]
        return (z12, z1 - z12, 1.0 - z1)
    if kind is TopologyKind.THREE_SECONDARY:
        z1, w = est[0], est[2]
        return (z1, w, 1.0 - z1 - w)
    if kind is TopologyKind.FOUR_BALANCED:
        z1, z12, w = est[2], est[0], est[4]
        return (z12, z1 - z12, w, 1.0 - z1 - w)
    z1, z12, z123 = est[4], est[2], est[0]
    return (z123, z12 - z123, z1 - z12, 1.0 - z1)


def ground_state_probability(counts: dict[str, int | float], wire: int) -> float:
    """Fraction of shots reading 0 on `wire` (bitstring position `wire`)."""
    total = 0.0
    zeros = 0.0
    for bits, c in counts.items():
        total += c
        if bits[wire] == "0":
            zeros += c
    if total <= 0:
        raise ZeroShots("counts are empty")
    return zeros / total


def fractions_from_counts(
    counts: dict[str, int | float], topology: ShowerTopology
) -> ProngFractions | Rejected:
    """Recover prong fractions from the high-side chain estimators.

    counts must cover all wires of the topology's circuit. Runs implying a
    negative fraction are Rejected.
    """
    kind = topology.kind
    phat = {w: ground_state_probability(counts, w) for w in _CHAIN_WIRES[kind]}
    est = {w: 2.0 * p - 1.0 for w, p in phat.items()}
    natural = _derive_fractions(kind, est)
    if min(natural) < 0.0:
        return Rejected(f"negative derived fraction {min(natural):.4f}")
    chain = _CHAIN_WIRES[kind]
    intermediate = tuple(est[w] for w in chain if w in topology.intermediate_wires)
    return ProngFractions.from_natural(
        natural,
        intermediate=intermediate,
        estimators=tuple((w, phat[w]) for w in chain),
        topology_kind=kind,
    )


def sigma_shift(fractions: ProngFractions, shots: int) -> ProngFractions:
    """Add one binomial standard error to each chain estimator, re-derive.

    The shifted fraction vector is clamped at zero and renormalized to sum
    to 1. shots -> infinity recovers the input.
    """
    if shots < 1:
        raise ZeroShots(f"shots must be >= 1, got {shots}")
    if not fractions.estimators or fractions.topology_kind is None:
        raise ValueError("sigma_shift needs fractions produced by fractions_from_counts")
    est = {}
    for wire, p in fractions.estimators:
        sigma = np.sqrt(p * (1.0 - p) / shots)
        est[wire] = 2.0 * p - 1.0 + sigma
    natural = np.clip(_derive_fractions(fractions.topology_kind, est), 0.0, None)
    natural = tuple(float(f) for f in natural / natural.sum())
    return ProngFractions.from_natural(
        natural,
        intermediate=fractions.intermediate,
        estimators=fractions.estimators,
        topology_kind=fractions.topology_kind,
    )


def raw_mode(counts: dict[str, int | float], topology: ShowerTopology) -> ProngFractions | Rejected:
    """Read each prong wire directly; reject on any negative estimate."""
    natural = tuple(
        2.0 * ground_state_probability(counts, w) - 1.0 for w in topology.prong_wires
    )
    if min(natural) < 0.0:
        return Rejected(f"negative prong estimate {min(natural):.4f}")
    return ProngFractions.from_natural(natural, topology_kind=topology.kind)


def run_pipeline(
    topology: ShowerTopology,
    batch: RunBatch,
    model: NoiseModel = IDEAL,
    mode: str = "derived",
) -> list[ProngFractions | Rejected]:
    """Sample a batch and recover fractions per run.

    mode: "raw" reads prong wires directly; "derived" applies the high-side
    derivation; "shifted" additionally applies the sigma shift to runs that
    survive the physicality cut.
    """
    if mode not in ("raw", "derived", "shifted"):
        raise ValueError(f"unknown mode {mode!r}")
    circuit = build_topology(topology, include_intermediate=True)
    results: list[ProngFractions | Rejected] = []
    for counts in noisy_sample(circuit, model, batch):
        if mode == "raw":
            results.append(raw_mode(counts, topology))
            continue
        res = fractions_from_counts(counts, topology)
        if mode == "shifted" and isinstance(res, ProngFractions):
            res = sigma_shift(res, batch.shots_per_run)
        results.append(res)
    return results
