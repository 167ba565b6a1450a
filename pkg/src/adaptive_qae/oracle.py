"""Measurement oracles for Grover-amplified amplitude estimation.

An estimator only ever sees an object with ``measure(m, r, shots)``; the hidden
probability lives on the :class:`AmplitudeProblem` held privately by the handle.
Real quantum backends would plug in by subclassing :class:`OracleHandle` and
overriding :meth:`OracleHandle._good_count`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_math import grover_probability

__all__ = [
    "PRNG_NAME",
    "AmplitudeProblem",
    "MeasurementBatch",
    "OracleHandle",
    "BinomialOracle",
    "ExactOracle",
    "measure",
    "exact_oracle",
    "ledger_totals",
]

PRNG_NAME = f"numpy.random.Generator(PCG64) numpy=={np.__version__}"


@dataclass(frozen=True)
class AmplitudeProblem:
    p_true: float
    label: str = ""

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_true <= 1.0:
            raise ValueError(f"p_true must lie in [0, 1], got {self.p_true!r}")


@dataclass(frozen=True)
class MeasurementBatch:
    m: int
    r: float
    shots: int
    good_count: int


class OracleHandle:
    """Base oracle: keeps the query ledger, subclasses decide the counts.

    ``oracle_queries`` accumulates ``shots * m`` (an ``m = 0`` batch is free)
    and ``total_shots`` accumulates ``shots``.
    """

    def __init__(self, problem: AmplitudeProblem) -> None:
        self._problem = problem
        self.oracle_queries = 0
        self.total_shots = 0
        self.calls = 0

    def measure(self, m: int, r: float, shots: int) -> MeasurementBatch:
        if shots < 1:
            raise ValueError(f"shots must be positive, got {shots}")
        if m < 0:
            raise ValueError(f"m must be nonnegative, got {m}")
        if not 0.0 < r <= 1.0:
            raise ValueError(f"adjustment factor must lie in (0, 1], got {r!r}")
        q = grover_probability(self._problem.p_true, m, r)
        good = int(self._good_count(q, shots))
        self.oracle_queries += shots * m
        self.total_shots += shots
        self.calls += 1
        return MeasurementBatch(m=m, r=r, shots=shots, good_count=good)

    def _good_count(self, q: float, shots: int) -> int:
        raise NotImplementedError

    def ledger_totals(self) -> tuple[int, int]:
        return self.oracle_queries, self.total_shots

    def reveal(self) -> AmplitudeProblem:
        """Hidden problem, for harnesses scoring a finished run."""
        return self._problem


class BinomialOracle(OracleHandle):
    """Seeded sampler drawing ``Binomial(shots, q)`` good counts.

    numpy's binomial sampler is exact (inversion for small ``shots * q``,
    BTPE otherwise), so no normal approximation enters the coverage analysis.
    """

    def __init__(self, problem: AmplitudeProblem, seed: int = 0) -> None:
        super().__init__(problem)
        self.seed = int(seed)
        self._rng = np.random.Generator(np.random.PCG64(self.seed))

    def _good_count(self, q: float, shots: int) -> int:
        return self._rng.binomial(shots, q)


class ExactOracle(OracleHandle):
    """Deterministic test double returning ``round(shots * q)``."""

    def _good_count(self, q: float, shots: int) -> int:
        return round(shots * q)


def measure(handle: BinomialOracle, m: int, r: float, shots: int) -> MeasurementBatch:
    return handle.measure(m, r, shots)


def exact_oracle(handle: OracleHandle, m: int, r: float, shots: int) -> MeasurementBatch:
    """Exact-count measurement against any handle's hidden problem, with ledger update."""
    shadow = ExactOracle(handle.reveal())
    batch = shadow.measure(m, r, shots)
    handle.oracle_queries += shadow.oracle_queries
    handle.total_shots += shadow.total_shots
    handle.calls += 1
    return batch


def ledger_totals(handle: OracleHandle) -> tuple[int, int]:
    return handle.ledger_totals()
