"""
Empirical scaling
=================

Sweep epsilon over five decades and fit the log-log slope of the mean query
count. A slope near -1 is the 1/eps Heisenberg-type scaling, against -2 for
plain sampling. The inner-loop count grows only logarithmically.
"""

from adaptive_qae.bench import ExperimentConfig, emit_report, fit_log_loglog, fit_scaling, run_experiment

config = ExperimentConfig(
    scenario="uniform_p",
    epsilons=(1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8),
    methods=("adaptive",),
    n_p_samples=50,
    master_seed=1,
)
rows = run_experiment(config)

for row in rows:
    print(f"eps={row.epsilon:.0e}  queries={row.mean_n_oracle:>14.1f}  inner ops={row.mean_classical_ops:6.2f}  "
          f"coverage={row.coverage_fraction:.2f}  worst r={row.worst_r:.3f}")

q = fit_scaling(rows, y_field="n_oracle")
c = fit_scaling(rows, y_field="classical_ops")
a, b, r2 = fit_log_loglog([r.epsilon for r in rows], [r.mean_classical_ops for r in rows])
print(f"\nquery slope {q.slope:.3f} (r^2 {q.r_squared:.4f})")
print(f"classical-ops slope {c.slope:.3f}; a L log L + b fit: a={a:.3f} b={b:.3f} r^2={r2:.3f}")

# the same rows as a report, fits included as comments
print()
print(emit_report(rows, [q, c]))
