"""Dense statevector engine for a trapped-ion style native gate set.

Conventions, fixed once here and relied on everywhere else:

* Qubit 0 is the *leftmost* bit of every measurement bitstring, i.e. the
  amplitude at index ``i`` belongs to the big-endian binary expansion of
  ``i`` over ``n_qubits`` bits.
* ``R_PHI(theta, phi) = exp(-i (cos(phi) X + sin(phi) Y) theta / 2)`` --
  a rotation about an axis in the equatorial plane.
* ``R_Z(theta) = exp(-i Z theta / 2)`` -- a virtual z rotation.
* ``XX(theta) = exp(+i (X o X) theta)`` -- the two-qubit entangling gate,
  maximally entangling at ``theta = pi/4``.
* Global phase is never meaningful; the only phase-aware comparison in the
  package is :func:`unitary_equivalent`, which works modulo one global phase.

States are never renormalized silently: a broken gate shows up as a broken
norm in the tests instead of being papered over.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 13
MAX_UNITARY_QUBITS = 6


class UnsupportedGateError(ValueError):
    """A gate kind that the requested operation refuses to handle."""


class GateKind(str, enum.Enum):
    R_PHI = "R_PHI"
    R_Z = "R_Z"
    XX = "XX"
    H = "H"
    CNOT = "CNOT"
    Z = "Z"
    X = "X"
    Y = "Y"


NATIVE_KINDS = frozenset({GateKind.R_PHI, GateKind.R_Z, GateKind.XX})
LOGICAL_KINDS = frozenset({GateKind.H, GateKind.CNOT, GateKind.Z, GateKind.X, GateKind.Y})
PAULI_KINDS = frozenset({GateKind.X, GateKind.Y, GateKind.Z})
TWO_QUBIT_KINDS = frozenset({GateKind.XX, GateKind.CNOT})


class Level(str, enum.Enum):
    LOGICAL = "LOGICAL"
    NATIVE = "NATIVE"


@dataclass(frozen=True)
class Gate:
    """One gate: a kind, its target qubit(s) and angles where applicable.

    ``theta`` is the rotation angle (R_PHI, R_Z, XX); ``phi`` is the
    equatorial axis angle and is meaningful for R_PHI only.
    """

    kind: GateKind
    targets: tuple[int, ...]
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        arity = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.targets) != arity:
            raise ValueError(f"{self.kind.value} takes {arity} target(s), got {self.targets}")
        if arity == 2 and self.targets[0] == self.targets[1]:
            raise ValueError(f"{self.kind.value} targets must be distinct, got {self.targets}")

    @property
    def is_native(self) -> bool:
        return self.kind in NATIVE_KINDS

    # Constructors, so call sites read like circuit diagrams.
    @classmethod
    def r_phi(cls, q: int, theta: float, phi: float) -> "Gate":
        return cls(GateKind.R_PHI, (q,), theta=theta, phi=phi)

    @classmethod
    def r_z(cls, q: int, theta: float) -> "Gate":
        return cls(GateKind.R_Z, (q,), theta=theta)

    @classmethod
    def xx(cls, a: int, b: int, theta: float) -> "Gate":
        return cls(GateKind.XX, (a, b), theta=theta)

    @classmethod
    def h(cls, q: int) -> "Gate":
        return cls(GateKind.H, (q,))

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls(GateKind.CNOT, (control, target))

    @classmethod
    def x(cls, q: int) -> "Gate":
        return cls(GateKind.X, (q,))

    @classmethod
    def y(cls, q: int) -> "Gate":
        return cls(GateKind.Y, (q,))

    @classmethod
    def z(cls, q: int) -> "Gate":
        return cls(GateKind.Z, (q,))


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list over ``n_qubits`` named qubits at one gate level."""

    n_qubits: int
    gates: tuple[Gate, ...]
    level: Level

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        allowed = NATIVE_KINDS if self.level is Level.NATIVE else LOGICAL_KINDS
        for g in self.gates:
            if any(not 0 <= t < self.n_qubits for t in g.targets):
                raise IndexError(f"gate {g.kind.value} targets {g.targets} out of range for {self.n_qubits} qubits")
            if g.kind not in allowed:
                raise ValueError(f"{g.kind.value} gate is not a {self.level.value}-level kind")

    def extended(self, extra: "Circuit | tuple[Gate, ...] | list[Gate]") -> "Circuit":
        """New circuit with ``extra`` gates appended (level must match)."""
        gates = extra.gates if isinstance(extra, Circuit) else tuple(extra)
        return Circuit(self.n_qubits, self.gates + tuple(gates), self.level)


@dataclass
class Statevector:
    """Dense complex amplitude vector over ``2**n_qubits`` basis states."""

    n_qubits: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, n_qubits: int) -> "Statevector":
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "Statevector":
        amps = np.asarray(amplitudes, dtype=complex)
        n = int(round(math.log2(amps.size)))
        if 2**n != amps.size or not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"amplitude length {amps.size} is not 2**n for n in 1..{MAX_QUBITS}")
        return cls(n, amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def fidelity_to(self, other: "Statevector") -> float:
        """Squared overlap |<other|self>|^2 (phase-insensitive)."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        return float(abs(np.vdot(other.amplitudes, self.amplitudes)) ** 2)

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())


@dataclass
class OutcomeDistribution:
    """Exact Born-rule probabilities keyed by bitstring (absent key = 0)."""

    n_qubits: int
    probabilities: dict[str, float]


_SQ2 = 1.0 / math.sqrt(2.0)
_H = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_XX_COUPLING = np.kron(_X, _X)


def gate_unitary(gate: Gate) -> np.ndarray:
    """The 2x2 or 4x4 unitary of ``gate`` (any kind)."""
    k = gate.kind
    if k is GateKind.R_PHI:
        c, s = math.cos(gate.theta / 2.0), math.sin(gate.theta / 2.0)
        e_minus = complex(math.cos(gate.phi), -math.sin(gate.phi))
        return np.array([[c, -1j * s * e_minus], [-1j * s * e_minus.conjugate(), c]], dtype=complex)
    if k is GateKind.R_Z:
        half = gate.theta / 2.0
        return np.array(
            [[complex(math.cos(half), -math.sin(half)), 0], [0, complex(math.cos(half), math.sin(half))]],
            dtype=complex,
        )
    if k is GateKind.XX:
        return math.cos(gate.theta) * np.eye(4, dtype=complex) + 1j * math.sin(gate.theta) * _XX_COUPLING
    if k is GateKind.H:
        return _H
    if k is GateKind.CNOT:
        return _CNOT
    if k is GateKind.X:
        return _X
    if k is GateKind.Y:
        return _Y
    if k is GateKind.Z:
        return _Z
    raise UnsupportedGateError(f"no unitary for gate kind {k!r}")


def _apply_unitary(amps: np.ndarray, u: np.ndarray, targets: tuple[int, ...], n_qubits: int) -> np.ndarray:
    """Apply a k-qubit unitary to the target axes of a (2,)*n (+extra) tensor."""
    k = len(targets)
    extra = amps.shape[1:] if amps.ndim > 1 else ()
    tensor = amps.reshape((2,) * n_qubits + extra)
    u_t = u.reshape((2,) * (2 * k))
    out = np.tensordot(u_t, tensor, axes=(list(range(k, 2 * k)), list(targets)))
    out = np.moveaxis(out, range(k), targets)
    return out.reshape((2**n_qubits,) + extra)


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    """Exact unitary action of a native gate or a Pauli on ``state``.

    Non-Pauli logical gates (H, CNOT) are refused: evolution is only ever
    done through the native set, with bare Paulis allowed for fault
    injection. Use :func:`simulate` to run whole circuits at either level.
    """
    if gate.kind not in NATIVE_KINDS and gate.kind not in PAULI_KINDS:
        raise UnsupportedGateError(
            f"apply_gate handles native gates and Paulis only, got {gate.kind.value}"
        )
    if any(not 0 <= t < state.n_qubits for t in gate.targets):
        raise IndexError(f"gate targets {gate.targets} out of range for {state.n_qubits} qubits")
    amps = _apply_unitary(state.amplitudes, gate_unitary(gate), gate.targets, state.n_qubits)
    return Statevector(state.n_qubits, amps)


def apply_pauli_string(state: Statevector, targets: tuple[int, ...], paulis: str) -> Statevector:
    """Apply a Pauli string like "X" or "ZY" to the given targets ("I" skipped)."""
    if len(paulis) != len(targets):
        raise ValueError(f"pauli string {paulis!r} does not match targets {targets}")
    out = state
    for q, p in zip(targets, paulis):
        if p == "I":
            continue
        out = apply_gate(out, Gate(GateKind(p), (q,)))
    return out


def simulate(circuit: Circuit, initial: Statevector | None = None) -> Statevector:
    """Noiseless evolution of ``circuit`` (either level) from |0...0> by default."""
    state = Statevector.zero(circuit.n_qubits) if initial is None else initial.copy()
    if initial is not None and initial.n_qubits != circuit.n_qubits:
        raise ValueError("initial state qubit count does not match circuit")
    amps = state.amplitudes
    for g in circuit.gates:
        amps = _apply_unitary(amps, gate_unitary(g), g.targets, circuit.n_qubits)
    return Statevector(circuit.n_qubits, amps)


def bitstring_of_index(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")


def outcome_distribution(state: Statevector) -> OutcomeDistribution:
    """Born-rule probability of every bitstring with nonzero weight."""
    probs = state.probabilities()
    n = state.n_qubits
    # 1e-15 cutoff drops float dust from compiled circuits, not real weight.
    dist = {
        bitstring_of_index(i, n): float(p) for i, p in enumerate(probs) if p > 1e-15
    }
    return OutcomeDistribution(n, dist)


def sample_measurement(state: Statevector, rng: np.random.Generator) -> str:
    """One projective measurement of all qubits; consumes one uniform draw."""
    cumulative = np.cumsum(state.probabilities())
    u = rng.random() * cumulative[-1]
    index = int(np.searchsorted(cumulative, u, side="right"))
    return bitstring_of_index(min(index, cumulative.size - 1), state.n_qubits)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full 2^n x 2^n matrix of the circuit (n <= MAX_UNITARY_QUBITS)."""
    if circuit.n_qubits > MAX_UNITARY_QUBITS:
        raise ValueError(
            f"full unitaries are limited to {MAX_UNITARY_QUBITS} qubits, got {circuit.n_qubits}"
        )
    dim = 2**circuit.n_qubits
    mat = np.eye(dim, dtype=complex)
    for g in circuit.gates:
        mat = _apply_unitary(mat, gate_unitary(g), g.targets, circuit.n_qubits)
    return mat


def unitary_equivalent(a: Circuit, b: Circuit, tol: float = 1e-8) -> bool:
    """True iff the two circuits implement the same unitary up to global phase."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("circuits act on different qubit counts")
    ua, ub = circuit_unitary(a), circuit_unitary(b)
    flat = np.argmax(np.abs(ua))
    ref = ua.flat[flat]
    if abs(ref) < 1e-12:
        return bool(np.max(np.abs(ub)) < tol)
    phase = ub.flat[flat] / ref
    if abs(abs(phase) - 1.0) > tol:
        return False
    return bool(np.max(np.abs(ub - phase * ua)) <= tol)
