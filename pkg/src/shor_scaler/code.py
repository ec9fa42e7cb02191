"""Decoding semantics on terminal measurement records: syndromes, per-block
majority correction, block-sign extraction, and the two logical readouts
(majority vote vs detection-discard).

Everything here is classical post-processing of measured bitstrings; no
ancilla circuits are involved.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .circuits import CodeSpec, Sign
from .qsim import OutcomeDistribution


class Decoder(str, enum.Enum):
    MAJORITY = "majority"
    DETECT = "detect"


@dataclass(frozen=True)
class SyndromeRecord:
    """Parity bits extracted from one shot; 0 means the +1 eigenvalue."""

    z_bits: tuple[int, ...] = ()
    x_bits: tuple[int, ...] = ()


@dataclass(frozen=True)
class VoteOutcome:
    logical_sign: Sign
    unanimous: bool
    tie_broken: bool


def parity(bits: str) -> int:
    return bits.count("1") & 1


def block_sign(x_basis_bits: str) -> Sign:
    """PLUS iff the block's x-basis bit-parity is even."""
    return Sign.PLUS if parity(x_basis_bits) == 0 else Sign.MINUS


def block_signs(x_basis_bits: str, spec: CodeSpec) -> tuple[Sign, ...]:
    """Per-block signs of one full-register x-basis shot."""
    if len(x_basis_bits) != spec.n_data:
        raise ValueError(f"expected {spec.n_data} bits, got {len(x_basis_bits)}")
    return tuple(block_sign("".join(x_basis_bits[q] for q in block)) for block in spec.blocks)


def majority_vote(signs, rng: np.random.Generator) -> VoteOutcome:
    """Strict majority of signs; exact ties (even counts) are broken uniformly.

    Draws exactly one uniform per tie, so a fixed rng stream reproduces the
    same tie assignments.
    """
    signs = tuple(signs)
    if not signs:
        raise ValueError("majority_vote needs at least one sign")
    plus = sum(1 for s in signs if s is Sign.PLUS)
    minus = len(signs) - plus
    unanimous = plus == 0 or minus == 0
    if plus > minus:
        return VoteOutcome(Sign.PLUS, unanimous, False)
    if minus > plus:
        return VoteOutcome(Sign.MINUS, unanimous, False)
    winner = Sign.PLUS if rng.random() < 0.5 else Sign.MINUS
    return VoteOutcome(winner, False, True)


def detect_vote(signs) -> Sign | None:
    """The common sign if unanimous, else None (the shot is discarded)."""
    signs = tuple(signs)
    if not signs:
        raise ValueError("detect_vote needs at least one sign")
    first = signs[0]
    return first if all(s is first for s in signs) else None


def z_syndrome(z_basis_bits: str, spec: CodeSpec) -> SyndromeRecord:
    """Adjacent-pair parities inside each block (bit-flip checks)."""
    if len(z_basis_bits) != spec.n_data:
        raise ValueError(f"expected {spec.n_data} bits, got {len(z_basis_bits)}")
    bits = tuple(int(z_basis_bits[a]) ^ int(z_basis_bits[b]) for a, b in spec.z_stabilizers)
    return SyndromeRecord(z_bits=bits)


def x_syndrome(x_basis_bits: str, spec: CodeSpec) -> SyndromeRecord:
    """Adjacent-block joint parities (phase-flip checks); each bit equals the
    XOR of the two block signs."""
    if len(x_basis_bits) != spec.n_data:
        raise ValueError(f"expected {spec.n_data} bits, got {len(x_basis_bits)}")
    bits = tuple(
        parity("".join(x_basis_bits[q] for q in stab)) for stab in spec.x_stabilizers
    )
    return SyndromeRecord(x_bits=bits)


def correct_single_bitflip(z_basis_bits: str, spec: CodeSpec) -> str:
    """Repetition-code correction: flip each block's minority bits.

    For even m an exact within-block tie has no minority and is left as is.
    """
    if len(z_basis_bits) != spec.n_data:
        raise ValueError(f"expected {spec.n_data} bits, got {len(z_basis_bits)}")
    out = list(z_basis_bits)
    for block in spec.blocks:
        ones = sum(int(z_basis_bits[q]) for q in block)
        if 2 * ones == len(block):
            continue
        majority = "1" if 2 * ones > len(block) else "0"
        for q in block:
            out[q] = majority
    return "".join(out)


def logical_readout_x(x_basis_bits: str, spec: CodeSpec, rng: np.random.Generator) -> VoteOutcome:
    """Majority vote over the per-block signs of one x-basis shot."""
    return majority_vote(block_signs(x_basis_bits, spec), rng)


def parity_expectation(dist: OutcomeDistribution, qubits) -> float:
    """<(-1)^(parity over qubits)> under an outcome distribution."""
    total = 0.0
    for bits, p in dist.probabilities.items():
        sub_parity = sum(int(bits[q]) for q in qubits) & 1
        total += p if sub_parity == 0 else -p
    return total


def stabilizer_expectations(
    spec: CodeSpec, dist_z: OutcomeDistribution, dist_x: OutcomeDistribution
) -> dict[str, float]:
    """Expectation of every stabilizer, read from basis-appropriate outcomes.

    Z-type pairs are evaluated on z-basis outcomes, X-type block pairs on
    x-basis outcomes (where each qubit's bit is its x eigenvalue).
    """
    values: dict[str, float] = {}
    for a, b in spec.z_stabilizers:
        values[f"Z{a}Z{b}"] = parity_expectation(dist_z, (a, b))
    for stab in spec.x_stabilizers:
        label = "X(" + ",".join(str(q) for q in stab) + ")"
        values[label] = parity_expectation(dist_x, stab)
    return values


VERDICT_CSV_COLUMNS = ("shot_index", "basis", "bitstring", "block_signs", "verdict", "tie_broken")


def decode_shot_row(
    shot_index: int,
    basis: str,
    bits: str,
    spec: CodeSpec,
    decoder: Decoder,
    rng: np.random.Generator,
) -> dict[str, object]:
    """One per-shot verdict row in the CSV export schema."""
    signs = block_signs(bits, spec)
    if decoder is Decoder.MAJORITY:
        outcome = majority_vote(signs, rng)
        verdict = outcome.logical_sign.symbol
        tie = outcome.tie_broken
    else:
        vote = detect_vote(signs)
        verdict = "DISCARD" if vote is None else vote.symbol
        tie = False
    return {
        "shot_index": shot_index,
        "basis": basis,
        "bitstring": bits,
        "block_signs": "".join(s.symbol for s in signs),
        "verdict": verdict,
        "tie_broken": tie,
    }


def write_verdict_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=VERDICT_CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
