"""Adaptive interval estimation of quantum amplitudes from Grover measurement counts."""

__version__ = "0.1.0"

from .core_math import (
    PeriodIndex,
    ProbInterval,
    ThetaInterval,
    arcsin_sqrt_diff_bound,
    grover_probability,
    invert_interval,
    p_from_theta,
    shrink_angle,
    stretch_angle,
    theta_from_p,
)
from .oracle import (
    AmplitudeProblem,
    BinomialOracle,
    ExactOracle,
    MeasurementBatch,
    OracleHandle,
    exact_oracle,
    ledger_totals,
    measure,
)
from .adaptive import AdaptiveConfig, EstimationResult, InnerLoopExceeded, RoundState, run
from .baselines import BaselineResult, IqaeConfig, MlaeConfig, clopper_pearson, run_iqae, run_mlae
from .bench import (
    AggregateRow,
    ExperimentConfig,
    SlopeFit,
    collect_runs,
    emit_report,
    fit_scaling,
    load_report,
    run_experiment,
)

__all__ = [
    "__version__",
    "PeriodIndex",
    "ProbInterval",
    "ThetaInterval",
    "arcsin_sqrt_diff_bound",
    "grover_probability",
    "invert_interval",
    "p_from_theta",
    "shrink_angle",
    "stretch_angle",
    "theta_from_p",
    "AmplitudeProblem",
    "BinomialOracle",
    "ExactOracle",
    "MeasurementBatch",
    "OracleHandle",
    "exact_oracle",
    "ledger_totals",
    "measure",
    "AdaptiveConfig",
    "EstimationResult",
    "InnerLoopExceeded",
    "RoundState",
    "run",
    "BaselineResult",
    "IqaeConfig",
    "MlaeConfig",
    "clopper_pearson",
    "run_iqae",
    "run_mlae",
    "AggregateRow",
    "ExperimentConfig",
    "SlopeFit",
    "collect_runs",
    "emit_report",
    "fit_scaling",
    "load_report",
    "run_experiment",
]
