"""Circuit builders: GHZ preparation, block-product encoders, basis changes,
and compilation from the logical gate set onto the native one.

The m-block code layout is row-major: block ``i`` owns qubits
``i*m .. i*m + m - 1``. Z-type parity checks pair adjacent qubits inside a
block; X-type checks span each pair of adjacent blocks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .qsim import (
    Circuit,
    Gate,
    GateKind,
    Level,
    Statevector,
    UnsupportedGateError,
)

_SQ2 = 1.0 / math.sqrt(2.0)


class Sign(str, enum.Enum):
    """The +/- branch of a GHZ superposition (and of the logical basis)."""

    PLUS = "plus"
    MINUS = "minus"

    @property
    def symbol(self) -> str:
        return "+" if self is Sign.PLUS else "-"

    def flipped(self) -> "Sign":
        return Sign.MINUS if self is Sign.PLUS else Sign.PLUS


@dataclass(frozen=True)
class GhzSpec:
    """Size and sign of one GHZ block; ``phi`` is the phase implementing the sign."""

    m: int
    sign: Sign
    phi: float = None  # type: ignore[assignment]  # derived from sign when omitted

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"GHZ blocks need m >= 2, got {self.m}")
        expected = 0.0 if self.sign is Sign.PLUS else math.pi
        if self.phi is None:
            object.__setattr__(self, "phi", expected)
        elif not math.isclose(self.phi, expected, abs_tol=1e-12):
            raise ValueError(f"sign {self.sign.value} requires phi={expected}, got {self.phi}")


@dataclass(frozen=True)
class CodeSpec:
    """Layout of the m-block, m-qubits-per-block code on m*m data qubits."""

    m: int
    n_data: int
    blocks: tuple[tuple[int, ...], ...]
    z_stabilizers: tuple[tuple[int, int], ...]
    x_stabilizers: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n_data != self.m * self.m:
            raise ValueError("n_data must equal m*m")
        flat = sorted(q for block in self.blocks for q in block)
        if flat != list(range(self.n_data)):
            raise ValueError("blocks must partition the data qubits")
        if len(self.z_stabilizers) != self.m * (self.m - 1):
            raise ValueError("wrong number of Z stabilizers")
        if len(self.x_stabilizers) != self.m - 1:
            raise ValueError("wrong number of X stabilizers")


def make_code_spec(m: int) -> CodeSpec:
    """Row-major code layout for block size ``m``."""
    if m < 2:
        raise ValueError(f"code needs m >= 2, got {m}")
    blocks = tuple(tuple(range(i * m, (i + 1) * m)) for i in range(m))
    z_pairs = tuple((block[j], block[j + 1]) for block in blocks for j in range(m - 1))
    x_sets = tuple(blocks[i] + blocks[i + 1] for i in range(m - 1))
    return CodeSpec(m=m, n_data=m * m, blocks=blocks, z_stabilizers=z_pairs, x_stabilizers=x_sets)


def build_ghz_logical(spec: GhzSpec) -> Circuit:
    """H on the first qubit, a CNOT ladder, and a trailing Z for the minus sign."""
    gates = [Gate.h(0)]
    gates += [Gate.cnot(q, q + 1) for q in range(spec.m - 1)]
    if spec.sign is Sign.MINUS:
        gates.append(Gate.z(0))
    return Circuit(spec.m, tuple(gates), Level.LOGICAL)


def build_shor_encoder(m: int, sign: Sign) -> Circuit:
    """m disjoint GHZ sub-circuits, one per block of the row-major layout."""
    if m < 2:
        raise ValueError(f"encoder needs m >= 2, got {m}")
    spec = make_code_spec(m)
    block_circuit = build_ghz_logical(GhzSpec(m, sign))
    gates = []
    for block in spec.blocks:
        for g in block_circuit.gates:
            gates.append(Gate(g.kind, tuple(block[t] for t in g.targets), g.theta, g.phi))
    return Circuit(m * m, tuple(gates), Level.LOGICAL)


# Native templates. H is a z rotation (free when z shifts are virtual)
# followed by one equatorial rotation; CNOT costs exactly one XX(pi/4)
# plus three equatorial rotations and one z rotation.
_QUARTER = math.pi / 2.0


def _compile_gate(g: Gate) -> list[Gate]:
    k = g.kind
    if k is GateKind.H:
        return [Gate.r_z(g.targets[0], math.pi), Gate.r_phi(g.targets[0], _QUARTER, _QUARTER)]
    if k is GateKind.X:
        return [Gate.r_phi(g.targets[0], math.pi, 0.0)]
    if k is GateKind.Y:
        return [Gate.r_phi(g.targets[0], math.pi, _QUARTER)]
    if k is GateKind.Z:
        return [Gate.r_z(g.targets[0], math.pi)]
    if k is GateKind.CNOT:
        c, t = g.targets
        return [
            Gate.r_phi(c, _QUARTER, _QUARTER),
            Gate.xx(c, t, math.pi / 4.0),
            Gate.r_phi(c, -_QUARTER, _QUARTER),
            Gate.r_phi(t, _QUARTER, 0.0),
            Gate.r_z(c, _QUARTER),
        ]
    raise UnsupportedGateError(f"no native template for gate kind {k.value}")


def compile_to_native(circuit: Circuit) -> Circuit:
    """Map a logical-level circuit onto the native gate set, gate by gate.

    The result is unitarily equivalent to the input up to one global phase;
    no cancellation or optimization is attempted.
    """
    if circuit.level is not Level.LOGICAL:
        raise ValueError("only logical-level circuits are compiled")
    gates: list[Gate] = []
    for g in circuit.gates:
        gates.extend(_compile_gate(g))
    return Circuit(circuit.n_qubits, tuple(gates), Level.NATIVE)


def append_x_basis_change(circuit: Circuit, qubits) -> Circuit:
    """Extend a logical circuit with one H per listed qubit (pre-measurement)."""
    if circuit.level is not Level.LOGICAL:
        raise ValueError("basis change is appended at the logical level; compile afterwards")
    return circuit.extended([Gate.h(q) for q in sorted(qubits)])


def ghz_state(m: int, sign: Sign) -> Statevector:
    """Exact target state (|0..0> +/- |1..1>)/sqrt(2) on m qubits."""
    if m < 2:
        raise ValueError(f"GHZ states need m >= 2, got {m}")
    amps = np.zeros(2**m, dtype=complex)
    amps[0] = _SQ2
    amps[-1] = _SQ2 if sign is Sign.PLUS else -_SQ2
    return Statevector(m, amps)


def logical_state(m: int, sign: Sign) -> Statevector:
    """Exact m-block product of same-sign GHZ blocks on m*m qubits."""
    block = ghz_state(m, sign).amplitudes
    amps = block
    for _ in range(m - 1):
        amps = np.kron(amps, block)
    return Statevector(m * m, amps)


# --- line-oriented text format: one gate per line, "KIND targets [theta [phi]]" ---


def circuit_to_text(circuit: Circuit) -> str:
    lines = [f"# n_qubits={circuit.n_qubits} level={circuit.level.value}"]
    for g in circuit.gates:
        parts = [g.kind.value] + [str(t) for t in g.targets]
        if g.kind is GateKind.R_PHI:
            parts += [repr(g.theta), repr(g.phi)]
        elif g.kind in (GateKind.R_Z, GateKind.XX):
            parts.append(repr(g.theta))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    n_qubits = None
    level = None
    gates: list[Gate] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                key, _, value = token.partition("=")
                if key == "n_qubits":
                    n_qubits = int(value)
                elif key == "level":
                    level = Level(value)
            continue
        fields = line.split()
        kind = GateKind(fields[0])
        arity = 2 if kind in (GateKind.XX, GateKind.CNOT) else 1
        targets = tuple(int(t) for t in fields[1 : 1 + arity])
        angles = [float(v) for v in fields[1 + arity :]]
        theta = angles[0] if angles else 0.0
        phi = angles[1] if len(angles) > 1 else 0.0
        gates.append(Gate(kind, targets, theta=theta, phi=phi))
    if n_qubits is None:
        raise ValueError("missing '# n_qubits=...' header line")
    if level is None:
        level = Level.NATIVE if any(g.kind in (GateKind.R_PHI, GateKind.R_Z, GateKind.XX) for g in gates) else Level.LOGICAL
    return Circuit(n_qubits, tuple(gates), level)
