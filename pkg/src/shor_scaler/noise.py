"""Monte Carlo Pauli-trajectory noise: per-gate depolarizing faults plus
independent per-qubit readout flips.

Reproducibility contract: shot ``i`` of a batch is computed entirely from
the substream ``SeedSequence(master_seed, spawn_key=(i,))``, so batches are
bit-identical regardless of execution order or worker count. Within one
shot the stream is consumed in a fixed order: one uniform per gate (fault
or not), one integer per fault, one uniform for the measurement, then one
uniform per qubit for readout flips.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import numpy as np

from .circuits import Sign
from .qsim import (
    Circuit,
    Gate,
    GateKind,
    Level,
    Statevector,
    _apply_unitary,
    apply_pauli_string,
    bitstring_of_index,
    gate_unitary,
)
from .stats import Basis, SampleSet

SINGLE_QUBIT_PAULIS = ("X", "Y", "Z")
TWO_QUBIT_PAULIS = tuple(
    a + b for a, b in itertools.product("IXYZ", repeat=2) if a + b != "II"
)


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing fault rates per gate plus a per-qubit readout flip rate.

    ``p1`` applies to each single-qubit native gate, ``p2`` to each XX gate;
    z rotations are classical phase shifts and stay fault-free unless
    ``rz_noisy`` is set.
    """

    p1: float
    p2: float
    p_ro: float
    rz_noisy: bool = False

    def __post_init__(self):
        for name in ("p1", "p2", "p_ro"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability, got {value}")

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        return cls(0.0, 0.0, 0.0)

    @property
    def is_noiseless(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0 and self.p_ro == 0.0


@dataclass(frozen=True)
class Calibration:
    """A p2-per-system-size table around shared p1 / p_ro rates."""

    p1: float
    p2_by_m: dict[int, float]
    p_ro: float
    rz_noisy: bool = False

    def model_for(self, m: int) -> NoiseModel:
        if m not in self.p2_by_m:
            known = sorted(self.p2_by_m)
            raise ValueError(f"no two-qubit rate calibrated for m={m}; known sizes: {known}")
        return NoiseModel(self.p1, self.p2_by_m[m], self.p_ro, self.rz_noisy)

    @classmethod
    def from_dict(cls, raw: dict) -> "Calibration":
        return cls(
            p1=float(raw["p1"]),
            p2_by_m={int(k): float(v) for k, v in raw["p2_by_m"].items()},
            p_ro=float(raw["p_ro"]),
            rz_noisy=bool(raw.get("rz_noisy", False)),
        )

    @classmethod
    def from_json(cls, path) -> "Calibration":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "p1": self.p1,
            "p2_by_m": {str(k): v for k, v in sorted(self.p2_by_m.items())},
            "p_ro": self.p_ro,
            "rz_noisy": self.rz_noisy,
        }


def default_calibration(name: str = "default_noise.json") -> Calibration:
    """A calibration file shipped with the package (see data/)."""
    text = resources.files("shor_scaler.data").joinpath(name).read_text()
    return Calibration.from_dict(json.loads(text))


@dataclass(frozen=True)
class Trajectory:
    """Record of the faults actually inserted into one shot."""

    circuit: Circuit
    faults: tuple[tuple[int, str], ...]
    seed: int | None

    def __post_init__(self):
        for index, paulis in self.faults:
            if not 0 <= index < len(self.circuit.gates):
                raise ValueError(f"fault index {index} outside circuit")
            if len(paulis) != len(self.circuit.gates[index].targets):
                raise ValueError(f"fault {paulis!r} does not match gate arity at {index}")


def _fault_probability(gate: Gate, model: NoiseModel) -> float:
    kind = gate.kind
    if kind is GateKind.R_PHI:
        return model.p1
    if kind is GateKind.XX:
        return model.p2
    if kind is GateKind.R_Z:
        return model.p1 if model.rz_noisy else 0.0
    raise ValueError(f"faults are sampled for native gates only, got {kind.value}")


def sample_fault(gate: Gate, model: NoiseModel, rng: np.random.Generator) -> str | None:
    """Maybe a uniform non-identity Pauli fault to insert after ``gate``.

    Always consumes one uniform; on a fault, one extra integer draw picks
    among the 3 single-qubit or 15 two-qubit Paulis.
    """
    p = _fault_probability(gate, model)
    if rng.random() >= p:
        return None
    if gate.kind is GateKind.XX:
        return TWO_QUBIT_PAULIS[int(rng.integers(len(TWO_QUBIT_PAULIS)))]
    return SINGLE_QUBIT_PAULIS[int(rng.integers(len(SINGLE_QUBIT_PAULIS)))]


def shot_rng(master_seed: int, shot_index: int) -> np.random.Generator:
    """The independent substream owning shot ``shot_index``."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(shot_index,)))


class _ShotEngine:
    """Per-circuit cache of fault-free prefix states.

    Faults are rare, so most shots reuse the cached final state outright and
    faulty shots only re-simulate from their first fault onward.
    """

    def __init__(self, circuit: Circuit, model: NoiseModel):
        if circuit.level is not Level.NATIVE:
            raise ValueError("noisy shots run native-level circuits only")
        self.circuit = circuit
        self.model = model
        self.n = circuit.n_qubits
        state = Statevector.zero(self.n).amplitudes
        prefixes = [state]
        for g in circuit.gates:
            state = _apply_unitary(state, gate_unitary(g), g.targets, self.n)
            prefixes.append(state)
        self._prefixes = prefixes
        self._final_cumulative = np.cumsum(np.abs(prefixes[-1]) ** 2)

    def draw_faults(self, rng: np.random.Generator) -> list[tuple[int, str]]:
        faults = []
        for index, g in enumerate(self.circuit.gates):
            pauli = sample_fault(g, self.model, rng)
            if pauli is not None:
                faults.append((index, pauli))
        return faults

    def run(self, rng: np.random.Generator) -> tuple[str, list[tuple[int, str]]]:
        faults = self.draw_faults(rng)
        if faults:
            fault_map = dict(faults)
            first = faults[0][0]
            state = Statevector(self.n, self._prefixes[first + 1].copy())
            state = apply_pauli_string(state, self.circuit.gates[first].targets, fault_map[first])
            for index in range(first + 1, len(self.circuit.gates)):
                g = self.circuit.gates[index]
                amps = _apply_unitary(state.amplitudes, gate_unitary(g), g.targets, self.n)
                state = Statevector(self.n, amps)
                if index in fault_map:
                    state = apply_pauli_string(state, g.targets, fault_map[index])
            cumulative = np.cumsum(state.probabilities())
        else:
            cumulative = self._final_cumulative
        u = rng.random() * cumulative[-1]
        index = int(np.searchsorted(cumulative, u, side="right"))
        bits = list(bitstring_of_index(min(index, cumulative.size - 1), self.n))
        flips = rng.random(self.n)
        for q in range(self.n):
            if flips[q] < self.model.p_ro:
                bits[q] = "1" if bits[q] == "0" else "0"
        return "".join(bits), faults


def run_noisy_shot(circuit: Circuit, model: NoiseModel, rng: np.random.Generator) -> str:
    """One experimental repetition: sampled faults, measurement, readout flips."""
    bits, _ = _ShotEngine(circuit, model).run(rng)
    return bits


def run_noisy_shot_traced(
    circuit: Circuit, model: NoiseModel, seed: int
) -> tuple[str, Trajectory]:
    """Like run_noisy_shot but keeps the fault record for reproducibility audits."""
    bits, faults = _ShotEngine(circuit, model).run(np.random.default_rng(seed))
    return bits, Trajectory(circuit, tuple(faults), seed)


def run_batch(
    circuit: Circuit,
    model: NoiseModel,
    n_shots: int,
    master_seed: int,
    *,
    basis: Basis,
    target_sign: Sign,
    m: int | None = None,
    workers: int = 1,
) -> SampleSet:
    """``n_shots`` independent trajectories of ``circuit`` under ``model``.

    Shot i draws everything from the (master_seed, i) substream, so the
    result does not depend on ``workers`` or on completion order.
    """
    if n_shots < 1:
        raise ValueError(f"n_shots must be >= 1, got {n_shots}")
    engine = _ShotEngine(circuit, model)

    def one(index: int) -> str:
        return engine.run(shot_rng(master_seed, index))[0]

    if workers <= 1:
        shots = [one(i) for i in range(n_shots)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            shots = list(pool.map(one, range(n_shots)))
    return SampleSet(
        basis=basis,
        target_sign=target_sign,
        m=circuit.n_qubits if m is None else m,
        shots=tuple(shots),
    )
