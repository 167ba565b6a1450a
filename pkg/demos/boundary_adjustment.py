"""
Why the adjustment factor matters
=================================

At p = 1/4 the angle arcsin(sqrt(p)) = pi/6 sits exactly on a period boundary
for m = 1, and on boundaries of many deeper periods too. Without an adjustment
an interval around it keeps straddling two periods. Here we look at the factor
r chosen in each round, and at how many classical steps each method spends.
"""

import numpy as np

from adaptive_qae import AdaptiveConfig, AmplitudeProblem, BinomialOracle, IqaeConfig, run, run_iqae

p = 0.25
eps = 1e-6

res = run(AdaptiveConfig(eps, halve_input=False), BinomialOracle(AmplitudeProblem(p), seed=3))
print("round  m        r       straddled")
for rs in res.rounds:
    print(f"{rs.t:>5}  {rs.m:<8} {rs.r:.5f}  {rs.r < 1.0}")

# r < 1 means the upper end of the interval was slid onto the period edge
print(f"\nadaptive: [{res.p_lo:.9f}, {res.p_hi:.9f}], {res.wall_classical_ops} inner iterations")

# the iterative baseline searches downward for a depth whose period fits
ops_ad, ops_iq = [], []
for seed in range(20):
    ops_ad.append(run(AdaptiveConfig(eps, halve_input=False), BinomialOracle(AmplitudeProblem(p), seed)).wall_classical_ops)
    ops_iq.append(run_iqae(IqaeConfig(eps), BinomialOracle(AmplitudeProblem(p), seed)).classical_ops)

print(f"mean classical ops over 20 seeds: adaptive {np.mean(ops_ad):.1f}, iterative {np.mean(ops_iq):.1f}")
