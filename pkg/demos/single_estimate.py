"""
Estimating one amplitude
========================

Run the adaptive estimator against a seeded binomial oracle and walk through
the rounds it took.
"""

from adaptive_qae import AdaptiveConfig, AmplitudeProblem, BinomialOracle, run

# the oracle hides p; the estimator only sees measurement counts
problem = AmplitudeProblem(0.3127)
oracle = BinomialOracle(problem, seed=11)

# p is known to be at most 1/2 here, so skip the halving reduction
config = AdaptiveConfig(epsilon=1e-5, alpha=0.05, K=3, n_shots=100, halve_input=False)
result = run(config, oracle)

print(f"interval  [{result.p_lo:.8f}, {result.p_hi:.8f}]  width {result.width:.3g}")
print(f"contains p: {result.interval.contains(problem.p_true)}")
print(f"oracle queries {result.n_oracle}, shots {result.total_shots}, rounds {len(result.rounds)} of T+1={result.T + 1}")

# each round: Grover depth m, period index k_hat, adjustment r, batches j
print(f"\n{'t':>2} {'m':>7} {'k_hat':>7} {'r':>8} {'j':>3} {'theta width':>12}")
for rs in result.rounds:
    w = rs.theta_iv.hi - rs.theta_iv.lo
    print(f"{rs.t:>2} {rs.m:>7} {rs.k_hat:>7} {rs.r:>8.4f} {rs.j:>3} {w:>12.3e}")

# the oracle keeps its own ledger, which must agree with the estimator's count
print(f"\nledger agrees: {oracle.oracle_queries == result.n_oracle}")
