"""Closed-form logical fidelity and yield of the m-block majority /
detection readouts, depolarizing scaling curves, optimal block size, and
the inverse problem of the block fidelity required for a target logical
fidelity.

Binomial coefficients come from exact integer arithmetic (math.comb); only
the final products are floating point.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .code import Decoder

_BISECTION_TOL = 1e-9


@dataclass(frozen=True)
class DepolarizingParams:
    """Physical qubit fidelity f and block size m of the scaling model."""

    f: float
    m: int

    def __post_init__(self):
        if not 0.0 <= self.f <= 1.0:
            raise ValueError(f"fidelity must be in [0, 1], got {self.f}")


@dataclass(frozen=True)
class ScalingCurve:
    m: int
    points: tuple[tuple[float, float], ...]  # (physical error, logical error)

    def __post_init__(self):
        errors = [p for p, _ in self.points]
        if any(b <= a for a, b in zip(errors, errors[1:])):
            raise ValueError("physical error must increase strictly across points")


def logical_fidelity(m: int, fx: float) -> float:
    """Probability that a majority vote over m independent blocks, each
    correct with probability fx, lands on the right sign (even-m ties are
    split evenly).
    """
    if not 0.0 <= fx <= 1.0:
        raise ValueError(f"fx must be in [0, 1], got {fx}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    total = 0.0
    for k in range(m // 2 + 1, m + 1):
        total += math.comb(m, k) * fx**k * (1.0 - fx) ** (m - k)
    if m % 2 == 0:
        half = m // 2
        total += 0.5 * math.comb(m, half) * fx**half * (1.0 - fx) ** half
    return total


def detect_fidelity_yield(m: int, fx: float) -> tuple[float, float]:
    """(fidelity among unanimous groups, fraction of groups kept).

    The yield fx**m + (1-fx)**m is bounded below by 2**(1-m) > 0, so the
    fidelity is always defined.
    """
    if not 0.0 <= fx <= 1.0:
        raise ValueError(f"fx must be in [0, 1], got {fx}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    kept = fx**m + (1.0 - fx) ** m
    return fx**m / kept, kept


def block_success_probability(m: int, f: float, literal: bool = False) -> float:
    """Block success under the depolarizing model, from physical fidelity f.

    Default reading: first-order error accumulation, p = 1 - m (1 - f),
    clamped to [0, 1]. The literal reading p = m f is only defined for
    f <= 1/m and is provided for comparison.
    """
    if literal:
        p = m * f
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"literal block success m*f = {p} outside [0, 1] (f = {f})")
        return p
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"physical fidelity {f} outside [0, 1]")
    return min(1.0, max(0.0, 1.0 - m * (1.0 - f)))


def scaling_curve(m: int, f_grid, literal: bool = False) -> ScalingCurve:
    """Logical error vs physical error for odd block size m.

    ``f_grid`` lists physical fidelities; each point maps to
    (1 - f, 1 - logical_fidelity(m, block_success)).
    """
    if m < 3 or m % 2 == 0:
        raise ValueError(f"scaling curves are defined for odd m >= 3, got {m}")
    points = []
    for f in f_grid:
        p_block = block_success_probability(m, f, literal=literal)
        points.append((1.0 - f, 1.0 - logical_fidelity(m, p_block)))
    points.sort(key=lambda pt: pt[0])
    return ScalingCurve(m, tuple(points))


def logical_error_at(m: int, physical_error: float, literal: bool = False) -> float:
    """Single point of the scaling curve, parameterized by physical error 1-f."""
    f = 1.0 - physical_error
    return 1.0 - logical_fidelity(m, block_success_probability(m, f, literal=literal))


def find_crossing(m_low: int, m_high: int, tol: float = 1e-6) -> float:
    """Physical error where the deeper code stops beating the shallower one.

    Below the returned value the m_high curve has the lower logical error.
    Located by bisection on the curve difference over (0, 1/m_high).
    """
    if not (3 <= m_low < m_high) or m_low % 2 == 0 or m_high % 2 == 0:
        raise ValueError(f"need odd 3 <= m_low < m_high, got {m_low}, {m_high}")

    def diff(eps: float) -> float:
        return logical_error_at(m_high, eps) - logical_error_at(m_low, eps)

    lo, hi = 1e-9, 1.0 / m_high - 1e-12
    if not (diff(lo) < 0.0 < diff(hi)):
        raise ValueError(f"no bracketed crossing between m={m_low} and m={m_high}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if diff(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def optimal_m(fx_by_m: dict[int, float], decoder: Decoder) -> int:
    """Block size maximizing the decoded logical fidelity; ties go small."""
    if not fx_by_m:
        raise ValueError("need at least one (m, fx) entry")
    best_m = None
    best_f = -1.0
    for m in sorted(fx_by_m):
        fx = fx_by_m[m]
        f = logical_fidelity(m, fx) if decoder is Decoder.MAJORITY else detect_fidelity_yield(m, fx)[0]
        if f > best_f:
            best_m, best_f = m, f
    return best_m


def required_ghz_fidelity(m: int, target_fl: float) -> float:
    """Block fidelity fx with logical_fidelity(m, fx) == target_fl.

    logical_fidelity(m, .) is strictly increasing on (0.5, 1), so bisection
    converges; resolved to 1e-9.
    """
    if not 0.5 < target_fl < 1.0:
        raise ValueError(f"target logical fidelity must be in (0.5, 1), got {target_fl}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    lo, hi = 0.5, 1.0
    while hi - lo > _BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if logical_fidelity(m, mid) < target_fl:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def required_ghz_for_physical_parity(m: int, physical_spam: float) -> float:
    """Block fidelity needed for the encoded state to match a bare physical
    qubit whose preparation+measurement fidelity is ``physical_spam``."""
    return required_ghz_fidelity(m, physical_spam)


def write_curves_csv(curves, path) -> None:
    """Flat CSV of scaling curves: one row per (m, physical_error) point."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("m", "physical_error", "logical_error"))
        for curve in curves:
            for eps, err in curve.points:
                writer.writerow((curve.m, repr(eps), repr(err)))
