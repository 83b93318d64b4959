"""Exact statevector and density-matrix simulation for up to 8 qubits.

Wire convention: wire 0 is the top wire of a circuit diagram and maps to the
most significant bit of the basis-state index, so |q0 q1 ... q_{n-1}> has
index sum(q_k * 2**(n-1-k)). Bitstring keys returned by sample_shots follow
the same order (leftmost character = wire 0).

All values are immutable after construction and every operation returns a new
object, so independent circuits can be evaluated concurrently. States are
dense complex128 arrays; at the 8-qubit cap that is 256 amplitudes, so no
sparse path is needed.

Randomness comes from numpy's default_rng (PCG64), seeded explicitly. Counts
are deterministic for a fixed seed; cross-language comparisons should share
recorded counts rather than expect RNG parity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyKeepSet,
    InvalidDensityMatrix,
    TooManyQubits,
    WireOutOfRange,
    ZeroShots,
)

MAX_QUBITS = 8

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitudes over n_qubits wires."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise TooManyQubits(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise DimensionMismatch(
                f"expected {2**self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @classmethod
    def zero(cls, n_qubits: int) -> StateVector:
        """|00...0>."""
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        p = np.abs(self.amplitudes) ** 2
        return p / p.sum()


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, trace-1 matrix over n_qubits wires."""

    n_qubits: int
    elements: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise TooManyQubits(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        dim = 2**self.n_qubits
        el = np.asarray(self.elements, dtype=complex)
        if el.shape != (dim, dim):
            raise DimensionMismatch(f"expected {dim}x{dim} matrix, got shape {el.shape}")
        object.__setattr__(self, "elements", _readonly(el))

    def validate(self, herm_tol: float = 1e-12, psd_tol: float = 1e-10) -> None:
        """Raise InvalidDensityMatrix unless Hermitian, unit trace, PSD."""
        el = self.elements
        if np.abs(el - el.conj().T).max() > herm_tol:
            raise InvalidDensityMatrix("matrix is not Hermitian")
        if abs(np.trace(el) - 1.0) > herm_tol:
            raise InvalidDensityMatrix(f"trace is {np.trace(el)}, expected 1")
        if np.linalg.eigvalsh(el).min() < -psd_tol:
            raise InvalidDensityMatrix("matrix has a significantly negative eigenvalue")


@dataclass(frozen=True)
class Gate:
    """Single-qubit gate placed on one wire.

    name is one of "ry" (params: angle), "u3" (params: theta, phi, lam), "x".
    """

    name: str
    wire: int
    params: tuple[float, ...] = ()

    def __post_init__(self):
        expected = {"ry": 1, "u3": 3, "x": 0}
        if self.name not in expected:
            raise ValueError(f"unknown gate {self.name!r}")
        if len(self.params) != expected[self.name]:
            raise ValueError(f"gate {self.name} takes {expected[self.name]} parameter(s)")

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.wire,)


@dataclass(frozen=True)
class ControlledGate:
    """base applied to its wire when the control wire reads control_state.

    control_state=0 is the open-dot anti-control, realized as
    (X on control) . C-U . (X on control).
    """

    base: Gate
    control: int
    control_state: int = 1

    def __post_init__(self):
        if self.control == self.base.wire:
            raise WireOutOfRange("control and target wires must differ")
        if self.control_state not in (0, 1):
            raise ValueError("control_state must be 0 or 1")

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.control, self.base.wire)


GateOp = Gate | ControlledGate


def ry(angle: float, wire: int) -> Gate:
    return Gate("ry", wire, (angle,))


def u3(theta: float, phi: float, lam: float, wire: int) -> Gate:
    return Gate("u3", wire, (theta, phi, lam))


def x(wire: int) -> Gate:
    return Gate("x", wire)


def cnot(control: int, target: int, control_state: int = 1) -> ControlledGate:
    return ControlledGate(x(target), control, control_state)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over n_qubits wires plus the wires read out."""

    n_qubits: int
    ops: tuple[GateOp, ...] = ()
    measured_wires: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "measured_wires", tuple(self.measured_wires))
        if len(set(self.measured_wires)) != len(self.measured_wires):
            raise WireOutOfRange("measured_wires must be distinct")
        for w in self.measured_wires:
            self._check_wire(w)
        for op in self.ops:
            for w in op.wires:
                self._check_wire(w)

    def _check_wire(self, w: int) -> None:
        if not 0 <= w < self.n_qubits:
            raise WireOutOfRange(f"wire {w} out of range for {self.n_qubits} qubits")

    @property
    def two_qubit_ops(self) -> tuple[ControlledGate, ...]:
        return tuple(op for op in self.ops if isinstance(op, ControlledGate))


def _base_matrix(g: Gate) -> np.ndarray:
    if g.name == "x":
        return _X.copy()
    if g.name == "ry":
        (a,) = g.params
        c, s = math.cos(a / 2), math.sin(a / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    theta, phi, lam = g.params
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def gate_matrix(g: GateOp) -> np.ndarray:
    """2x2 matrix of a single-qubit gate, or the 4x4 of a controlled gate.

    For the 4x4, the control qubit is the first (most significant) index.
    """
    if isinstance(g, Gate):
        return _base_matrix(g)
    u = _base_matrix(g.base)
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = u
    if g.control_state == 0:
        xi = np.kron(_X, np.eye(2))
        m = xi @ m @ xi
    return m


def apply(state: StateVector, g: GateOp) -> StateVector:
    """Apply one gate embedded on its wires; norm is preserved."""
    n = state.n_qubits
    for w in g.wires:
        if not 0 <= w < n:
            raise WireOutOfRange(f"wire {w} out of range for {n} qubits")
    psi = state.amplitudes.reshape([2] * n)
    if isinstance(g, Gate):
        u = _base_matrix(g)
        psi = np.tensordot(u, psi, axes=([1], [g.wire]))
        psi = np.moveaxis(psi, 0, g.wire)
    else:
        u = gate_matrix(g).reshape(2, 2, 2, 2)  # (c', t', c, t)
        psi = np.tensordot(u, psi, axes=([2, 3], [g.control, g.base.wire]))
        psi = np.moveaxis(psi, (0, 1), (g.control, g.base.wire))
    return StateVector(n, psi.reshape(-1))


def run(circuit: Circuit, state: StateVector | None = None) -> StateVector:
    """Apply the circuit's ops in order to `state` (default |0...0>)."""
    if state is None:
        state = StateVector.zero(circuit.n_qubits)
    if state.n_qubits != circuit.n_qubits:
        raise DimensionMismatch(
            f"state has {state.n_qubits} qubits, circuit has {circuit.n_qubits}"
        )
    for op in circuit.ops:
        state = apply(state, op)
    return state


def to_density(state: StateVector) -> DensityMatrix:
    """Outer product |psi><psi|."""
    a = state.amplitudes
    return DensityMatrix(state.n_qubits, np.outer(a, a.conj()))


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full 2^n x 2^n unitary of the circuit (ops composed in order)."""
    dim = 2**circuit.n_qubits
    u = np.eye(dim, dtype=complex)
    for op in circuit.ops:
        u = embed(op, circuit.n_qubits) @ u
    return u


def embed(g: GateOp, n_qubits: int) -> np.ndarray:
    """Gate matrix embedded in the full 2^n-dimensional space."""
    dim = 2**n_qubits
    cols = np.eye(dim, dtype=complex)
    out = np.empty((dim, dim), dtype=complex)
    for j in range(dim):
        out[:, j] = apply(StateVector(n_qubits, cols[:, j]), g).amplitudes
    return out


def partial_trace(rho: DensityMatrix, keep: set[int] | list[int] | tuple[int, ...]) -> DensityMatrix:
    """Reduced density matrix on `keep` wires, in ascending wire order."""
    keep = sorted(set(keep))
    if not keep:
        raise EmptyKeepSet("keep set must be nonempty")
    n = rho.n_qubits
    for w in keep:
        if not 0 <= w < n:
            raise WireOutOfRange(f"wire {w} out of range for {n} qubits")
    t = rho.elements.reshape([2] * (2 * n))
    remaining = list(range(n))
    m = n
    while len(remaining) > len(keep):
        for axis, w in enumerate(remaining):
            if w not in keep:
                t = np.trace(t, axis1=axis, axis2=m + axis)
                remaining.pop(axis)
                m -= 1
                break
    dim = 2 ** len(keep)
    return DensityMatrix(len(keep), t.reshape(dim, dim))


def expect_sigma3(rho: DensityMatrix | StateVector, wire: int) -> float:
    """Tr(sigma3 . rho_wire) of the one-qubit reduced state, in [-1, 1]."""
    if isinstance(rho, StateVector):
        n = rho.n_qubits
        if not 0 <= wire < n:
            raise WireOutOfRange(f"wire {wire} out of range for {n} qubits")
        p = rho.probabilities().reshape([2] * n)
        p0 = p.take(0, axis=wire).sum()
        return float(2.0 * p0 - 1.0)
    reduced = partial_trace(rho, [wire])
    return float((reduced.elements[0, 0] - reduced.elements[1, 1]).real)


def bitstring(index: int, n_qubits: int) -> str:
    """Basis index to bitstring, wire 0 leftmost."""
    return format(index, f"0{n_qubits}b")


def sample_shots(state: StateVector, shots: int, seed: int) -> dict[str, int]:
    """Multinomial draw of `shots` bitstrings from |amplitude|^2.

    Deterministic for a fixed seed; counts sum to shots. Keys are bitstrings
    over all wires, wire 0 leftmost.
    """
    if shots < 1:
        raise ZeroShots("shots must be >= 1")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, state.probabilities())
    n = state.n_qubits
    return {bitstring(i, n): int(c) for i, c in enumerate(counts) if c > 0}
