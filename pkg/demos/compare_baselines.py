"""
Adaptive estimator against MLAE and IQAE
========================================

Same hidden probability, same target width, three estimators. Query counts
are comparable; the classical work is where they differ.
"""

from adaptive_qae.bench import mlae_T_for, run_single

p, eps = 0.1374, 1e-4
print(f"p = {p}, epsilon = {eps}, MLAE schedule length T = {mlae_T_for(eps)}\n")
print(f"{'method':<10} {'p_lo':>12} {'p_hi':>12} {'width':>10} {'queries':>10} {'classical':>10}")

for method in ("adaptive", "mlae", "iqae_cp", "iqae_ch"):
    res, _ = run_single(method, p, eps, seed=5, assume_p_le_half=True)
    ops = res.wall_classical_ops if method == "adaptive" else res.classical_ops
    width = res.interval.hi - res.interval.lo
    print(
        f"{method:<10} {res.interval.lo:>12.8f} {res.interval.hi:>12.8f} {width:>10.2e} "
        f"{res.n_oracle:>10} {ops:>10}"
    )

# MLAE has no width guarantee; its interval comes from the likelihood ratio
