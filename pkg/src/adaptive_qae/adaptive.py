"""Adaptive amplitude estimation with an adjustment factor.

Each round ``t`` runs ``m_t`` Grover iterations on a state whose good-state
probability has been scaled by ``r_t``. Shots are added in batches of
``n_shots`` until the angle interval is narrower than ``1/K`` of the current
period. The next depth is the largest one whose period still covers that
interval, and ``r_{t+1}`` slides the interval's upper end onto a period
boundary when it straddles one, so every inversion is unambiguous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol

from .core_math import (
    HALF_PI,
    PeriodIndex,
    ProbInterval,
    ThetaInterval,
    invert_interval,
    p_from_theta,
    period_bounds,
    period_width,
    stretch_angle,
)
from .oracle import MeasurementBatch

__all__ = [
    "M_MAX",
    "InnerLoopExceeded",
    "Oracle",
    "AdaptiveConfig",
    "RoundState",
    "EstimationResult",
    "compute_T",
    "compute_delta",
    "default_max_inner_iterations",
    "clamp_ci",
    "cap_and_rescale",
    "next_m",
    "next_period",
    "next_adjustment",
    "run",
]

# returned by next_m for a zero-width interval
M_MAX = 2**53


class InnerLoopExceeded(RuntimeError):
    """The shot-accumulation loop ran past its safety cap."""


class Oracle(Protocol):
    def measure(self, m: int, r: float, shots: int) -> MeasurementBatch: ...


@dataclass(frozen=True)
class AdaptiveConfig:
    """Inputs of the adaptive estimator.

    Attributes:
        epsilon: Target width of the final probability interval.
        alpha: One minus the confidence level.
        K: Odd growth factor (>= 3) of the Grover depth between rounds.
        n_shots: Shots added per inner-loop batch.
        max_inner_iterations: Batches allowed per round before giving up;
            ``None`` uses :func:`default_max_inner_iterations`.
        halve_input: Estimate ``p/2`` instead of ``p`` and double the result.
            Required unless the caller knows ``p <= 1/2``.
    """

    epsilon: float
    alpha: float = 0.05
    K: int = 3
    n_shots: int = 100
    max_inner_iterations: int | None = None
    halve_input: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.K < 3 or self.K % 2 == 0:
            raise ValueError(f"K must be an odd integer >= 3, got {self.K!r}")
        if self.n_shots < 1:
            raise ValueError(f"n_shots must be positive, got {self.n_shots!r}")
        if self.max_inner_iterations is not None and self.max_inner_iterations < 1:
            raise ValueError("max_inner_iterations must be positive")


@dataclass(frozen=True)
class RoundState:
    """Snapshot of one round at the exit of its shot-accumulation loop.

    ``theta_inverted`` is the angle interval for the *adjusted* angle on
    period ``k_hat``; ``theta_iv`` is the interval for the original angle
    after capping and undoing the adjustment.
    """

    t: int
    m: int
    r: float
    k_hat: int
    N: int
    X: int
    j: int
    delta: float
    ci_raw: ProbInterval
    theta_inverted: ThetaInterval
    theta_iv: ThetaInterval
    r_applied: float


@dataclass
class EstimationResult:
    interval: ProbInterval
    n_oracle: int
    total_shots: int
    rounds: list[RoundState] = field(default_factory=list)
    stopped_at: int = 0
    wall_classical_ops: int = 0
    T: int = 0
    halved: bool = False

    @property
    def p_lo(self) -> float:
        return self.interval.lo

    @property
    def p_hi(self) -> float:
        return self.interval.hi

    @property
    def width(self) -> float:
        return self.interval.hi - self.interval.lo

    @property
    def r_values(self) -> list[float]:
        return [rs.r for rs in self.rounds]


def compute_T(epsilon: float, K: int) -> int:
    """Upper bound ``ceil(log(pi / (K eps)) / log K)`` on the round index."""
    x = math.log(math.pi / (K * epsilon)) / math.log(K)
    nearest = round(x)
    # exact integer ratios should not be pushed up by a last-bit error
    if abs(x - nearest) < 1e-9:
        return max(int(nearest), 0)
    return max(math.ceil(x), 0)


def compute_delta(T: int, alpha: float, j: int, n_shots: int) -> float:
    """Hoeffding half-width for the ``j``-th batch, union-bounded over all ``j``.

    Summing ``6 / (pi^2 j^2)`` over ``j`` keeps the simultaneous miss
    probability per round at ``alpha / (T + 1)``.
    """
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j}")
    return math.sqrt(math.log(math.pi**2 * (T + 1) * j * j / (3 * alpha)) / (2 * j * n_shots))


def default_max_inner_iterations(T: int, alpha: float, K: int, n_shots: int) -> int:
    """Four times the worst-case batch count at the smallest admissible ``r = 1/4``."""
    c = math.sin(math.sqrt(1 / 8) / K * HALF_PI) ** 2
    a = math.ceil(4 / (c * c * n_shots) * math.log(math.pi**2 * (T + 1) / (3 * alpha)))
    b = math.ceil(64 / (c**4 * n_shots**2))
    return 4 * max(a, b)


def clamp_ci(X: int, N: int, delta: float) -> ProbInterval:
    if not 0 <= X <= N:
        raise ValueError(f"need 0 <= X <= N, got X={X}, N={N}")
    mean = X / N
    return ProbInterval(max(mean - delta, 0.0), min(mean + delta, 1.0))


def cap_and_rescale(theta_iv: ThetaInterval, r: float) -> ThetaInterval:
    """Cap at ``arcsin(sqrt(r/2))`` and undo the adjustment factor ``r``.

    The cap keeps the stretch Lipschitz and encodes ``p <= 1/2``; the output
    always lies in ``[0, pi/4]``.
    """
    if not 0.0 < r <= 1.0:
        raise ValueError(f"r must lie in (0, 1], got {r!r}")
    quarter = math.pi / 4
    # asin(sqrt(0.5)) rounds one ulp above pi/4
    cap = min(math.asin(math.sqrt(r / 2)), quarter)
    lo = min(theta_iv.lo, cap)
    hi = min(theta_iv.hi, cap)
    if r < 1.0:
        lo = min(stretch_angle(lo, r), quarter)
        hi = min(stretch_angle(hi, r), quarter)
    return ThetaInterval(lo, hi)


def next_m(theta_iv: ThetaInterval, m_max: int = M_MAX) -> int:
    """Largest ``m`` whose period ``(pi/2)/(2m+1)`` still covers the interval width."""
    w = theta_iv.hi - theta_iv.lo
    if w <= 0.0:
        return m_max
    m = max(int(math.floor(math.pi / (4 * w) - 0.5)), 0)
    # settle floor() round-off against the same comparison the loop exit uses
    while m > 0 and w > period_width(m):
        m -= 1
    while m < m_max and w <= period_width(m + 1):
        m += 1
    return min(m, m_max)


def next_period(theta_lo: float, m_next: int) -> PeriodIndex:
    """Period containing ``theta_lo``; a point on a boundary belongs to the upper period."""
    n = 2 * m_next + 1
    k = int(math.floor(theta_lo * n / HALF_PI))
    k = min(max(k, 0), 2 * m_next)
    if k > 0 and theta_lo < period_bounds(k, m_next)[0]:
        k -= 1
    elif k < 2 * m_next and theta_lo >= period_bounds(k + 1, m_next)[0]:
        k += 1
    return PeriodIndex(k, m_next)


def next_adjustment(theta_iv: ThetaInterval, period: PeriodIndex) -> float:
    """Factor mapping ``theta_iv.hi`` onto the period's upper edge, or 1 if it fits."""
    upper = period.bounds[1]
    if upper < theta_iv.hi:
        return math.sin(upper) ** 2 / math.sin(theta_iv.hi) ** 2
    return 1.0


def run(config: AdaptiveConfig, oracle: Oracle) -> EstimationResult:
    """Estimate a good-state probability to width ``config.epsilon``.

    The oracle is only ever asked for batches of ``(m, r, shots)``. With
    ``halve_input`` every requested ``r`` is halved, the internal target width
    becomes ``epsilon / 2`` and the final interval is doubled.

    Raises:
        InnerLoopExceeded: a round needed more batches than the safety cap,
            which cannot happen for an oracle honouring its distribution.
    """
    halve = config.halve_input
    eps_internal = config.epsilon / 2 if halve else config.epsilon
    K, n_shots, alpha = config.K, config.n_shots, config.alpha
    T = compute_T(eps_internal, K)
    cap = config.max_inner_iterations or default_max_inner_iterations(T, alpha, K, n_shots)

    m, k_hat, r = 0, 0, 1.0
    rounds: list[RoundState] = []
    n_oracle = total_shots = ops = 0
    p_lo = p_hi = 0.0

    for t in range(T + 1):
        r_applied = r / 2 if halve else r
        target = HALF_PI / (K * (2 * m + 1))
        period = PeriodIndex(k_hat, m)
        X = j = 0
        while True:
            j += 1
            if j > cap:
                raise InnerLoopExceeded(
                    f"round {t} (m={m}, r={r:.6g}) exceeded {cap} batches of {n_shots} shots"
                )
            batch = oracle.measure(m, r_applied, n_shots)
            X += batch.good_count
            n_oracle += m * n_shots
            total_shots += n_shots
            N = j * n_shots
            delta = compute_delta(T, alpha, j, n_shots)
            ci = clamp_ci(X, N, delta)
            inverted = invert_interval(ci, period)
            theta_iv = cap_and_rescale(inverted, r)
            if theta_iv.hi - theta_iv.lo <= target:
                break
        ops += j
        rounds.append(
            RoundState(
                t=t, m=m, r=r, k_hat=k_hat, N=N, X=X, j=j, delta=delta, ci_raw=ci,
                theta_inverted=inverted, theta_iv=theta_iv, r_applied=r_applied,
            )
        )
        p_lo = p_from_theta(theta_iv.lo)
        p_hi = p_from_theta(theta_iv.hi)
        if halve:
            p_lo, p_hi = 2 * p_lo, min(2 * p_hi, 1.0)
        if t == T or p_hi - p_lo <= config.epsilon:
            break
        m_next = next_m(theta_iv)
        nxt = next_period(theta_iv.lo, m_next)
        r = next_adjustment(theta_iv, nxt)
        m, k_hat = m_next, nxt.k

    return EstimationResult(
        interval=ProbInterval(p_lo, p_hi),
        n_oracle=n_oracle,
        total_shots=total_shots,
        rounds=rounds,
        stopped_at=rounds[-1].t,
        wall_classical_ops=ops,
        T=T,
        halved=halve,
    )
