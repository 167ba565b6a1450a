"""Angle/probability transforms and period bookkeeping for Grover statistics.

A good-state probability ``p`` corresponds to the angle ``theta = arcsin(sqrt(p))``
in ``[0, pi/2]``. After ``m`` Grover iterations the good-state probability is
``sin^2((2m + 1) theta)``, which is monotone on each *period*
``[k, k + 1] * (pi/2) / (2m + 1)`` for ``k = 0, ..., 2m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "HALF_PI",
    "TOL",
    "ThetaInterval",
    "ProbInterval",
    "PeriodIndex",
    "period_width",
    "period_bounds",
    "theta_from_p",
    "p_from_theta",
    "grover_probability",
    "invert_interval",
    "shrink_angle",
    "stretch_angle",
    "arcsin_sqrt_diff_bound",
]

HALF_PI = math.pi / 2
# absolute slack for round-off at [0, 1] and period edges
TOL = 1e-12


def _clamp_unit(x: float, what: str) -> float:
    if -TOL <= x < 0.0:
        return 0.0
    if 1.0 < x <= 1.0 + TOL:
        return 1.0
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{what} must lie in [0, 1], got {x!r}")
    return x


def _check_angle(theta: float) -> float:
    if -TOL <= theta < 0.0:
        return 0.0
    if HALF_PI < theta <= HALF_PI + TOL:
        return HALF_PI
    if not 0.0 <= theta <= HALF_PI:
        raise ValueError(f"angle must lie in [0, pi/2], got {theta!r}")
    return theta


@dataclass(frozen=True)
class ThetaInterval:
    """Closed angle interval inside ``[0, pi/2]``."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (-TOL <= self.lo <= self.hi + TOL and self.hi <= HALF_PI + TOL):
            raise ValueError(f"invalid theta interval [{self.lo!r}, {self.hi!r}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def to_prob(self) -> ProbInterval:
        return ProbInterval(p_from_theta(self.lo), p_from_theta(self.hi))


@dataclass(frozen=True)
class ProbInterval:
    """Closed probability interval inside ``[0, 1]``."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (-TOL <= self.lo <= self.hi + TOL and self.hi <= 1.0 + TOL):
            raise ValueError(f"invalid probability interval [{self.lo!r}, {self.hi!r}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, p: float) -> bool:
        return self.lo <= p <= self.hi


@dataclass(frozen=True)
class PeriodIndex:
    """The ``k``-th monotone period of ``sin^2((2 depth + 1) theta)``."""

    k: int
    depth: int

    def __post_init__(self) -> None:
        if self.depth < 0 or not 0 <= self.k <= 2 * self.depth:
            raise ValueError(f"period index k={self.k} invalid for depth m={self.depth}")

    @property
    def bounds(self) -> tuple[float, float]:
        return period_bounds(self.k, self.depth)


def period_width(m: int) -> float:
    """Length ``(pi/2) / (2m + 1)`` of one period at Grover depth ``m``."""
    return HALF_PI / (2 * m + 1)


def period_bounds(k: int, m: int) -> tuple[float, float]:
    n = 2 * m + 1
    return k * HALF_PI / n, (k + 1) * HALF_PI / n


def theta_from_p(p: float) -> float:
    """Return ``arcsin(sqrt(p))``."""
    return math.asin(math.sqrt(_clamp_unit(p, "p")))


def p_from_theta(theta: float) -> float:
    """Return ``sin(theta)**2`` for ``theta`` in ``[0, pi/2]``."""
    return math.sin(_check_angle(theta)) ** 2


def grover_probability(p: float, m: int, r: float = 1.0) -> float:
    """Good-state probability after ``m`` Grover iterations on the adjusted state.

    The adjustment multiplies the good-state probability by ``r`` before
    amplification, so the result is ``sin^2((2m + 1) arcsin(sqrt(r p)))``.
    """
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    if not 0.0 < r <= 1.0:
        raise ValueError(f"adjustment factor must lie in (0, 1], got {r!r}")
    rp = _clamp_unit(r * _clamp_unit(p, "p"), "r * p")
    return math.sin((2 * m + 1) * math.asin(math.sqrt(rp))) ** 2


def invert_interval(ci: ProbInterval, period: PeriodIndex) -> ThetaInterval:
    """Pull a CI for ``sin^2((2m+1) theta)`` back to ``theta`` on a known period.

    On even periods the map is increasing, on odd ones decreasing, which is
    why the endpoints swap roles for odd ``k``.
    """
    n = 2 * period.depth + 1
    k = period.k
    a_lo = math.asin(math.sqrt(_clamp_unit(ci.lo, "lower bound")))
    a_hi = math.asin(math.sqrt(_clamp_unit(ci.hi, "upper bound")))
    if k % 2 == 0:
        lo = (a_lo + k * HALF_PI) / n
        hi = (a_hi + k * HALF_PI) / n
    else:
        lo = (-a_hi + (k + 1) * HALF_PI) / n
        hi = (-a_lo + (k + 1) * HALF_PI) / n
    return ThetaInterval(lo, min(hi, HALF_PI))


def shrink_angle(theta: float, r: float) -> float:
    """Map ``theta`` to ``arcsin(sqrt(r sin^2 theta))``; 1-Lipschitz for ``r <= 1``."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must lie in [0, 1], got {r!r}")
    s = math.sin(_check_angle(theta))
    return math.asin(math.sqrt(min(r * s * s, 1.0)))


def stretch_angle(theta: float, r: float) -> float:
    """Inverse of :func:`shrink_angle`: ``arcsin(sqrt(sin^2(theta) / r))``.

    Callers are expected to have capped ``theta`` at ``arcsin(sqrt(r/2))`` so
    the argument stays at most 1/2, where the map is ``sqrt(2/r)``-Lipschitz.
    """
    if not 0.0 < r <= 1.0:
        raise ValueError(f"r must lie in (0, 1], got {r!r}")
    s = math.sin(_check_angle(theta))
    x = _clamp_unit(s * s / r, "sin^2(theta) / r")
    return math.asin(math.sqrt(x))


def arcsin_sqrt_diff_bound(p1: float, p2: float) -> float:
    """Upper bound ``arcsin(sqrt(|p1 - p2|))`` on ``|arcsin sqrt p1 - arcsin sqrt p2|``."""
    d = abs(_clamp_unit(p1, "p1") - _clamp_unit(p2, "p2"))
    return math.asin(math.sqrt(d))
