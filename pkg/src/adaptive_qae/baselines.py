"""Comparator estimators driven by the same oracle interface.

* MLAE: fixed exponential schedule ``m = 0, 1, 2, 4, ..., 2^(T-1)``, grid
  search of the joint binomial likelihood, likelihood-ratio interval.
* IQAE: reference reimplementation of the iterative scheme. Each stage
  descends from the largest admissible depth until the current angle interval
  fits inside one period (FINDNEXTK), then samples at that depth.

``classical_ops`` counts likelihood evaluations for MLAE and
FINDNEXTK probes plus CI evaluations for IQAE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special, stats

from .adaptive import Oracle, compute_delta, compute_T, next_m, next_period
from .core_math import HALF_PI, PeriodIndex, ProbInterval, ThetaInterval, invert_interval, p_from_theta

__all__ = [
    "CI_METHODS",
    "MlaeConfig",
    "IqaeConfig",
    "IqaeRound",
    "BaselineResult",
    "clopper_pearson",
    "mlae_schedule",
    "mlae_log_likelihood",
    "run_mlae",
    "iqae_round_budget",
    "iqae_half_width",
    "fits_single_period",
    "find_next_k",
    "run_iqae",
]

CI_METHODS = ("chernoff_hoeffding", "clopper_pearson")
_CHUNK = 1 << 16


@dataclass(frozen=True)
class MlaeConfig:
    T: int
    n_shots: int = 100
    grid_resolution: int | None = None
    alpha: float = 0.05

    def __post_init__(self) -> None:
        if self.T < 0:
            raise ValueError(f"T must be nonnegative, got {self.T}")
        if self.n_shots < 1:
            raise ValueError("n_shots must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")

    def resolved_grid(self) -> int:
        if self.grid_resolution is not None:
            return self.grid_resolution
        # 32 points per oscillation of the fastest likelihood factor
        return max(10_000, 16 * (2 * mlae_schedule(self.T)[-1] + 1))


@dataclass(frozen=True)
class IqaeConfig:
    epsilon: float
    alpha: float = 0.05
    n_shots: int = 100
    ci_method: str = "clopper_pearson"
    min_ratio: float = 2.0
    max_iterations: int = 1_000_000

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.ci_method not in CI_METHODS:
            raise ValueError(f"ci_method must be one of {CI_METHODS}, got {self.ci_method!r}")
        if self.min_ratio <= 1.0:
            raise ValueError("min_ratio must exceed 1 for the depth to grow")
        if self.n_shots < 1:
            raise ValueError("n_shots must be positive")


@dataclass(frozen=True)
class IqaeRound:
    m: int
    k: int
    N: int
    X: int
    j: int
    theta_iv: ThetaInterval
    probes: int
    stalled: bool


@dataclass
class BaselineResult:
    interval: ProbInterval
    n_oracle: int
    classical_ops: int
    total_shots: int = 0
    estimate: float | None = None
    degenerate: bool = False
    rounds: list = field(default_factory=list)
    method: str = ""

    @property
    def width(self) -> float:
        return self.interval.hi - self.interval.lo


def clopper_pearson(X: int, N: int, alpha: float) -> ProbInterval:
    """Exact two-sided binomial interval from Beta quantiles."""
    if not 0 <= X <= N or N < 1:
        raise ValueError(f"need 0 <= X <= N and N >= 1, got X={X}, N={N}")
    lo = 0.0 if X == 0 else float(stats.beta.ppf(alpha / 2, X, N - X + 1))
    hi = 1.0 if X == N else float(stats.beta.ppf(1 - alpha / 2, X + 1, N - X))
    return ProbInterval(lo, hi)


# ---------------------------------------------------------------------------
# MLAE


def mlae_schedule(T: int) -> list[int]:
    return [0] + [2**i for i in range(T)]


def mlae_log_likelihood(theta, schedule, counts, shots) -> np.ndarray:
    """Joint binomial log-likelihood (constants dropped) at each angle in ``theta``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.zeros_like(theta)
    for m, x, n in zip(schedule, counts, shots):
        s = np.sin((2 * m + 1) * theta) ** 2
        out += special.xlogy(x, s) + special.xlogy(n - x, 1.0 - s)
    return out


def run_mlae(config: MlaeConfig, oracle: Oracle) -> BaselineResult:
    """Maximum-likelihood estimate on the exponential schedule.

    The interval keeps every angle whose log-likelihood is within
    ``chi2_1(1 - alpha) / 2`` of the maximum; its coverage is empirical only.
    """
    schedule = mlae_schedule(config.T)
    counts = [oracle.measure(m, 1.0, config.n_shots).good_count for m in schedule]
    shots = [config.n_shots] * len(schedule)
    n_oracle = sum(m * config.n_shots for m in schedule)
    evals = 0

    def ll(th):
        nonlocal evals
        th = np.atleast_1d(th)
        evals += th.size
        return mlae_log_likelihood(th, schedule, counts, shots)

    grid_size = config.resolved_grid()
    grid = np.linspace(0.0, HALF_PI, grid_size)
    values = np.concatenate([ll(grid[i : i + _CHUNK]) for i in range(0, grid_size, _CHUNK)])
    best = int(np.argmax(values))

    lo_b, hi_b = grid[max(best - 1, 0)], grid[min(best + 1, grid_size - 1)]
    opt = optimize.minimize_scalar(
        lambda th: -ll(th)[0], bounds=(lo_b, hi_b), method="bounded", options={"xatol": 1e-13}
    )
    theta_hat, ll_hat = grid[best], values[best]
    if -opt.fun > ll_hat:
        theta_hat, ll_hat = float(opt.x), float(-opt.fun)

    level = ll_hat - stats.chi2.ppf(1 - config.alpha, df=1) / 2
    inside = np.flatnonzero(values >= level)
    i_lo, i_hi = int(inside[0]), int(inside[-1])

    def edge(a: float, b: float) -> float:
        # a is outside the set, b inside
        return optimize.brentq(lambda th: ll(th)[0] - level, a, b, xtol=1e-14)

    th_lo = grid[i_lo] if i_lo == 0 else edge(grid[i_lo - 1], grid[i_lo])
    th_hi = grid[i_hi] if i_hi == grid_size - 1 else edge(grid[i_hi + 1], grid[i_hi])
    th_lo, th_hi = min(th_lo, theta_hat), max(th_hi, theta_hat)

    degenerate = all(x in (0, n) for x, n in zip(counts, shots))
    return BaselineResult(
        interval=ProbInterval(p_from_theta(th_lo), p_from_theta(th_hi)),
        n_oracle=n_oracle,
        classical_ops=evals,
        total_shots=sum(shots),
        estimate=p_from_theta(theta_hat),
        degenerate=degenerate,
        rounds=list(zip(schedule, counts)),
        method="mlae",
    )


# ---------------------------------------------------------------------------
# IQAE


def iqae_round_budget(epsilon: float, min_ratio: float = 2.0) -> int:
    """Stage-count bound ``T`` used to split ``alpha`` over ``T + 1`` stages."""
    return max(math.ceil(math.log(math.pi / (min_ratio * epsilon)) / math.log(min_ratio)), 0)


def iqae_half_width(budget: int, alpha: float, j: int, n_shots: int) -> float:
    """Chernoff-Hoeffding half-width for ``budget`` stages, union-bounded over ``j``."""
    return compute_delta(budget - 1, alpha, j, n_shots)


def fits_single_period(theta_iv: ThetaInterval, m: int) -> bool:
    period = next_period(theta_iv.lo, m)
    return theta_iv.hi <= period.bounds[1]


def find_next_k(theta_iv: ThetaInterval, m_current: int, min_ratio: float = 2.0) -> tuple[int, int]:
    """Descend from the largest admissible depth to the first whose period holds ``theta_iv``.

    Only depths with ``2m + 1 >= min_ratio * (2 m_current + 1)`` are tried.

    Returns:
        ``(m_next, probes)``; ``m_next == m_current`` when no depth qualifies.
    """
    m_top = next_m(theta_iv)
    m_floor = max(math.ceil((min_ratio * (2 * m_current + 1) - 1) / 2), m_current + 1)
    probes = 0
    hi = m_top
    while hi >= m_floor:
        lo = max(hi - _CHUNK + 1, m_floor)
        ms = np.arange(hi, lo - 1, -1, dtype=np.int64)
        n = 2 * ms + 1
        k = np.floor(theta_iv.lo * n / HALF_PI)
        ok = theta_iv.hi <= (k + 1) * HALF_PI / n
        for i in np.flatnonzero(ok):
            if fits_single_period(theta_iv, int(ms[i])):
                return int(ms[i]), probes + int(i) + 1
        probes += ms.size
        hi = lo - 1
    return m_current, probes


def run_iqae(config: IqaeConfig, oracle: Oracle) -> BaselineResult:
    """Iterative estimation with a FINDNEXTK depth search.

    Counts are pooled while the depth stays unchanged. The Chernoff-Hoeffding
    variant reuses the adaptive estimator's union-bounded half-width with
    ``alpha`` split over the stage budget. Clopper-Pearson intervals are taken
    at level ``alpha / budget`` per stage.
    """
    budget = iqae_round_budget(config.epsilon, config.min_ratio) + 1
    n_shots = config.n_shots
    theta_iv = ThetaInterval(0.0, HALF_PI)
    m, k = 0, 0
    X = j = 0
    ops = n_oracle = total_shots = 0
    rounds: list[IqaeRound] = []

    for _ in range(config.max_iterations):
        j += 1
        X += oracle.measure(m, 1.0, n_shots).good_count
        n_oracle += m * n_shots
        total_shots += n_shots
        N = j * n_shots
        if config.ci_method == "chernoff_hoeffding":
            d = iqae_half_width(budget, config.alpha, j, n_shots)
            ci = ProbInterval(max(X / N - d, 0.0), min(X / N + d, 1.0))
        else:
            ci = clopper_pearson(X, N, config.alpha / budget)
        ops += 1
        theta_iv = invert_interval(ci, PeriodIndex(k, m))
        p_lo, p_hi = p_from_theta(theta_iv.lo), p_from_theta(theta_iv.hi)
        if p_hi - p_lo <= config.epsilon:
            rounds.append(IqaeRound(m, k, N, X, j, theta_iv, 0, False))
            break
        m_next, probes = find_next_k(theta_iv, m, config.min_ratio)
        ops += probes
        stalled = m_next == m
        rounds.append(IqaeRound(m, k, N, X, j, theta_iv, probes, stalled))
        if not stalled:
            m, k = m_next, next_period(theta_iv.lo, m_next).k
            X = j = 0
    else:
        raise RuntimeError(f"IQAE did not reach width {config.epsilon} in {config.max_iterations} batches")

    return BaselineResult(
        interval=ProbInterval(p_lo, p_hi),
        n_oracle=n_oracle,
        classical_ops=ops,
        total_shots=total_shots,
        estimate=(p_lo + p_hi) / 2,
        rounds=rounds,
        method="iqae_ch" if config.ci_method == "chernoff_hoeffding" else "iqae_cp",
    )
