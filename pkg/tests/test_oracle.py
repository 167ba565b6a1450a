import math

import numpy as np
import pytest

from adaptive_qae.core_math import grover_probability
from adaptive_qae.oracle import (
    AmplitudeProblem,
    BinomialOracle,
    ExactOracle,
    exact_oracle,
    ledger_totals,
    measure,
)


def sampler(p, seed=0):
    return BinomialOracle(AmplitudeProblem(p), seed=seed)


def test_zero_probability_gives_zero():
    assert measure(sampler(0.0), 3, 1.0, 100).good_count == 0


def test_certain_outcome():
    # arcsin(sqrt(0.25)) = pi/6, three times that is pi/2
    for shots in (1, 17, 1000):
        assert measure(sampler(0.25), 1, 1.0, shots).good_count == shots


def test_large_sample_band_and_golden_count():
    batch = measure(sampler(0.2, seed=20240601), 0, 1.0, 10**6)
    assert abs(batch.good_count / 10**6 - 0.2) <= 3.3 * math.sqrt(0.16 / 10**6)
    assert batch.good_count == 199652


def test_golden_sequence():
    h = BinomialOracle(AmplitudeProblem(0.37), seed=7)
    assert [h.measure(m, 0.8, 100).good_count for m in range(6)] == [31, 96, 9, 58, 75, 0]


@pytest.mark.parametrize("p, m, shots, expected", [(0.2, 0, 100, 20), (0.2, 1, 100, 97), (0.0, 5, 100, 0)])
def test_exact_oracle(p, m, shots, expected):
    h = sampler(p)
    assert exact_oracle(h, m, 1.0, shots).good_count == expected
    assert ExactOracle(AmplitudeProblem(p)).measure(m, 1.0, shots).good_count == expected
    assert ledger_totals(h) == (m * shots, shots)


def test_ledger():
    h = sampler(0.3)
    assert ledger_totals(h) == (0, 0)
    measure(h, 0, 1.0, 100)
    assert ledger_totals(h) == (0, 100)
    measure(h, 3, 1.0, 200)
    assert ledger_totals(h) == (600, 300)


def test_ledger_additive_and_monotone():
    rng = np.random.default_rng(5)
    h = sampler(0.4, seed=1)
    q_tot = s_tot = 0
    prev = (0, 0)
    for _ in range(50):
        m, shots = int(rng.integers(0, 50)), int(rng.integers(1, 300))
        measure(h, m, float(rng.uniform(0.25, 1)), shots)
        q_tot += m * shots
        s_tot += shots
        cur = ledger_totals(h)
        assert cur[0] >= prev[0] and cur[1] >= prev[1]
        prev = cur
    assert ledger_totals(h) == (q_tot, s_tot)


def test_determinism():
    calls = [(0, 1.0, 100), (2, 0.7, 50), (9, 0.3, 1000), (1, 1.0, 10)]
    a, b = sampler(0.31, seed=99), sampler(0.31, seed=99)
    assert [a.measure(*c).good_count for c in calls] == [b.measure(*c).good_count for c in calls]
    c = sampler(0.31, seed=100)
    assert [a.measure(*x).good_count for x in calls] != [c.measure(*x).good_count for x in calls]


@pytest.mark.parametrize("p, m, r", [(0.2, 0, 1.0), (0.13, 3, 0.8), (0.45, 7, 0.6)])
def test_distribution(p, m, r):
    q = grover_probability(p, m, r)
    shots, reps = 100, 10_000
    frac = np.array([sampler(p, seed=s).measure(m, r, shots).good_count for s in range(reps)]) / shots
    sigma_mean = math.sqrt(q * (1 - q) / shots / reps)
    assert abs(frac.mean() - q) <= 4 * sigma_mean
    assert frac.var(ddof=1) == pytest.approx(q * (1 - q) / shots, rel=0.2)


@pytest.mark.parametrize("args", [(0, 1.0, 0), (-1, 1.0, 10), (0, 0.0, 10), (0, 1.2, 10)])
def test_precondition_errors(args):
    with pytest.raises(ValueError):
        sampler(0.3).measure(*args)


def test_problem_validation():
    with pytest.raises(ValueError):
        AmplitudeProblem(1.5)
