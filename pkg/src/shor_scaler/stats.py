"""Fidelity estimators over shot records, the up-sampling construction that
turns groups of m single-block shots into synthetic m-block logical shots,
and an exact enumeration oracle for the decoded fidelities.

Uncertainties are binomial throughout: sigma = sqrt(F (1-F) / N).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .circuits import Sign
from .code import Decoder, detect_vote, majority_vote, parity
from .qsim import OutcomeDistribution


class Basis(str, enum.Enum):
    Z = "Z"
    X = "X"


@dataclass(frozen=True)
class SampleSet:
    """Measured bitstrings from one prepared state in one basis.

    Bitstrings are length ``m`` for single-block runs or ``m*m`` for
    full-register runs.
    """

    basis: Basis
    target_sign: Sign
    m: int
    shots: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "shots", tuple(self.shots))
        valid = {self.m, self.m * self.m}
        for s in self.shots:
            if len(s) not in valid:
                raise ValueError(f"shot length {len(s)} not in {sorted(valid)}")

    @property
    def n_shots(self) -> int:
        return len(self.shots)


@dataclass(frozen=True)
class FidelityEstimate:
    value: float
    sigma: float

    @classmethod
    def from_counts(cls, successes: int, trials: int) -> "FidelityEstimate":
        if trials < 1:
            raise ValueError("need at least one trial")
        value = successes / trials
        return cls(value, math.sqrt(value * (1.0 - value) / trials))


def estimate_fz(s: SampleSet) -> FidelityEstimate:
    """Fraction of z-basis shots equal to all-zeros or all-ones."""
    if s.basis is not Basis.Z:
        raise ValueError(f"estimate_fz needs a Z-basis sample set, got {s.basis.value}")
    if not s.shots:
        raise ValueError("empty sample set")
    width = len(s.shots[0])
    good = sum(1 for bits in s.shots if bits == "0" * width or bits == "1" * width)
    return FidelityEstimate.from_counts(good, s.n_shots)


def estimate_fx(s: SampleSet) -> FidelityEstimate:
    """Fraction of x-basis shots whose parity matches the target sign."""
    if s.basis is not Basis.X:
        raise ValueError(f"estimate_fx needs an X-basis sample set, got {s.basis.value}")
    if not s.shots:
        raise ValueError("empty sample set")
    want = 0 if s.target_sign is Sign.PLUS else 1
    good = sum(1 for bits in s.shots if parity(bits) == want)
    return FidelityEstimate.from_counts(good, s.n_shots)


def _shot_signs(s: SampleSet) -> list[Sign]:
    return [Sign.PLUS if parity(bits) == 0 else Sign.MINUS for bits in s.shots]


def _groups(s: SampleSet) -> list[list[Sign]]:
    """Consecutive, non-overlapping groups of m shots; the remainder is dropped."""
    if s.basis is not Basis.X:
        raise ValueError("up-sampling works on X-basis sample sets")
    if any(len(bits) != s.m for bits in s.shots):
        raise ValueError("up-sampling needs single-block shots of length m")
    if s.n_shots < s.m:
        raise ValueError(f"need at least m={s.m} shots, got {s.n_shots}")
    signs = _shot_signs(s)
    n_groups = s.n_shots // s.m
    return [signs[i * s.m : (i + 1) * s.m] for i in range(n_groups)]


def upsample_majority(s: SampleSet, rng: np.random.Generator) -> FidelityEstimate:
    """Majority-vote logical fidelity of the up-sampled m-block shots.

    Groups are decoded in order; the rng is consumed only on even-m ties.
    """
    groups = _groups(s)
    good = sum(1 for g in groups if majority_vote(g, rng).logical_sign is s.target_sign)
    return FidelityEstimate.from_counts(good, len(groups))


def upsample_detect(s: SampleSet) -> tuple[FidelityEstimate | None, FidelityEstimate]:
    """(fidelity among kept shots, yield) after discarding non-unanimous groups.

    With zero kept groups the fidelity is undefined and reported as None.
    """
    groups = _groups(s)
    kept = 0
    good = 0
    for g in groups:
        vote = detect_vote(g)
        if vote is None:
            continue
        kept += 1
        if vote is s.target_sign:
            good += 1
    yield_est = FidelityEstimate.from_counts(kept, len(groups))
    if kept == 0:
        return None, yield_est
    return FidelityEstimate.from_counts(good, kept), yield_est


def empirical_distribution(s: SampleSet) -> OutcomeDistribution:
    """Relative frequencies of the observed bitstrings."""
    if not s.shots:
        raise ValueError("empty sample set")
    counts: dict[str, int] = {}
    for bits in s.shots:
        counts[bits] = counts.get(bits, 0) + 1
    n = s.n_shots
    return OutcomeDistribution(len(s.shots[0]), {k: v / n for k, v in sorted(counts.items())})


@dataclass(frozen=True)
class OracleResult:
    """Exact decoded fidelity implied by a single-block outcome distribution."""

    block_success: float
    fidelity: float
    yield_fraction: float


def exact_logical_oracle(
    dist: OutcomeDistribution, m: int, decoder: Decoder, target_sign: Sign
) -> OracleResult:
    """Exact logical fidelity and yield by enumeration, no sampling.

    The block-sign success probability p is summed straight off the
    distribution; the decoded fidelity is then accumulated over all 2^m
    sign patterns (ties counted half each way), which keeps this routine
    independent of any closed-form expression for the same quantity.
    """
    want = 0 if target_sign is Sign.PLUS else 1
    p = sum(prob for bits, prob in dist.probabilities.items() if parity(bits) == want)
    q = 1.0 - p
    if decoder is Decoder.DETECT:
        accepted = p**m + q**m
        return OracleResult(p, p**m / accepted, accepted)
    fidelity = 0.0
    for pattern in range(2**m):
        correct = m - bin(pattern).count("1")
        weight = p**correct * q ** (m - correct)
        if 2 * correct > m:
            fidelity += weight
        elif 2 * correct == m:
            fidelity += 0.5 * weight
    return OracleResult(p, fidelity, 1.0)


SCALING_CSV_COLUMNS = (
    "m",
    "prep_sign",
    "Fz",
    "Fz_sigma",
    "Fx_plus",
    "Fx_plus_sigma",
    "Fx_minus",
    "Fx_minus_sigma",
    "FL_plus",
    "FL_plus_sigma",
    "FL_minus",
    "FL_minus_sigma",
)

DETECT_CSV_COLUMNS = (
    "m",
    "prep_sign",
    "detect_fidelity",
    "detect_fidelity_sigma",
    "yield",
    "yield_sigma",
)
