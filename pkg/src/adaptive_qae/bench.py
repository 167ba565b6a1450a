"""Experiment grids over (method, epsilon, p), aggregation, scaling fits and reports.

Per-run seeds are derived from the configuration alone (see :data:`SEED_RULE`)
so results do not depend on execution order or worker count.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__
from .adaptive import AdaptiveConfig, run
from .baselines import IqaeConfig, MlaeConfig, run_iqae, run_mlae
from .oracle import PRNG_NAME, AmplitudeProblem, BinomialOracle, ExactOracle

__all__ = [
    "SCENARIOS",
    "METHODS",
    "CSV_COLUMNS",
    "SEED_RULE",
    "DEFAULT_EPSILONS",
    "ExperimentConfig",
    "RunRecord",
    "AggregateRow",
    "SlopeFit",
    "derive_seed",
    "draw_p_values",
    "mlae_T_for",
    "run_single",
    "collect_runs",
    "aggregate",
    "run_experiment",
    "failure_fraction",
    "fit_scaling",
    "fit_log_loglog",
    "report_metadata",
    "emit_report",
    "load_report",
]

METHODS = ("adaptive", "mlae", "iqae_cp", "iqae_ch")
DEFAULT_EPSILONS = (1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)

# n_shots, p sampler, default methods
SCENARIOS = {
    "uniform_p": dict(n_shots=100, methods=("adaptive", "mlae", "iqae_cp")),
    "boundary_p_025": dict(n_shots=100, methods=("adaptive", "iqae_cp")),
    "shots_800": dict(n_shots=800, methods=("adaptive", "iqae_cp", "iqae_ch")),
}

CSV_COLUMNS = (
    "method",
    "epsilon",
    "run_count",
    "coverage_fraction",
    "mean_n_oracle",
    "mean_total_shots",
    "mean_classical_ops",
    "mean_final_width",
    "mean_r",
    "worst_r",
    "failures",
)

SEED_RULE = (
    "seed = int.from_bytes(blake2b(f'{master_seed}:{method}:{eps_index}:{p_index}', "
    "digest_size=8).digest(), 'little'); p-draws use PCG64(master_seed)"
)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = "uniform_p"
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS
    n_p_samples: int = 100
    alpha: float = 0.05
    K: int = 3
    n_shots: int | None = None
    methods: tuple[str, ...] | None = None
    master_seed: int = 0
    exact_oracle: bool = False
    p_values: tuple[float, ...] | None = None
    mlae_max_T: int = 14

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {sorted(SCENARIOS)}")
        for m in self.methods or ():
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
        if not self.epsilons or any(not 0 < e < 1 for e in self.epsilons):
            raise ValueError("epsilons must be a nonempty list of values in (0, 1)")
        if self.n_p_samples < 1:
            raise ValueError("n_p_samples must be positive")
        if self.n_shots is not None and self.n_shots < 1:
            raise ValueError("n_shots must be positive")

    @property
    def shots(self) -> int:
        return self.n_shots if self.n_shots is not None else SCENARIOS[self.scenario]["n_shots"]

    @property
    def method_list(self) -> tuple[str, ...]:
        return tuple(self.methods) if self.methods else SCENARIOS[self.scenario]["methods"]

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["n_shots"] = self.shots
        d["methods"] = list(self.method_list)
        d["epsilons"] = list(self.epsilons)
        d["p_values"] = None if self.p_values is None else list(self.p_values)
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class RunRecord:
    method: str
    eps_index: int
    epsilon: float
    p_index: int
    p_true: float
    seed: int
    p_lo: float = math.nan
    p_hi: float = math.nan
    n_oracle: int = 0
    total_shots: int = 0
    classical_ops: int = 0
    r_values: list[float] = field(default_factory=list)
    error: str | None = None
    wall_seconds: float = 0.0
    result: object = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def covered(self) -> bool:
        return self.p_lo <= self.p_true <= self.p_hi

    @property
    def width(self) -> float:
        return self.p_hi - self.p_lo


@dataclass(frozen=True)
class AggregateRow:
    method: str
    epsilon: float
    run_count: int
    coverage_fraction: float
    mean_n_oracle: float
    mean_total_shots: float
    mean_classical_ops: float
    mean_final_width: float
    mean_r: float | None
    worst_r: float | None
    failures: int


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    x_field: str = "epsilon"
    y_field: str = "mean_n_oracle"
    n_points: int = 0


def derive_seed(master_seed: int, method: str, eps_index: int, p_index: int) -> int:
    key = f"{master_seed}:{method}:{eps_index}:{p_index}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def draw_p_values(config: ExperimentConfig) -> list[float]:
    if config.p_values is not None:
        return [float(p) for p in config.p_values]
    if config.scenario == "boundary_p_025":
        return [0.25] * config.n_p_samples
    rng = np.random.Generator(np.random.PCG64(config.master_seed))
    return [float(p) for p in rng.uniform(0.0, 0.5, config.n_p_samples)]


def mlae_T_for(epsilon: float) -> int:
    """MLAE schedule length used for a target width ``epsilon``."""
    return max(1, math.ceil(math.log2(1 / epsilon)) - 2)


def _task_list(config: ExperimentConfig) -> list[tuple]:
    ps = draw_p_values(config)
    le_half = all(p <= 0.5 for p in ps)
    tasks = []
    for method in config.method_list:
        for ei, eps in enumerate(config.epsilons):
            if method == "mlae" and mlae_T_for(eps) > config.mlae_max_T:
                continue
            for pi, p in enumerate(ps):
                seed = derive_seed(config.master_seed, method, ei, pi)
                tasks.append((config, method, ei, eps, pi, p, seed, le_half))
    return tasks


def run_single(
    method: str,
    p_true: float,
    epsilon: float,
    *,
    alpha: float = 0.05,
    K: int = 3,
    n_shots: int = 100,
    seed: int = 0,
    exact: bool = False,
    assume_p_le_half: bool = False,
    mlae_T: int | None = None,
):
    """Run one estimator against a fresh oracle; returns ``(result, oracle)``."""
    problem = AmplitudeProblem(p_true)
    oracle = ExactOracle(problem) if exact else BinomialOracle(problem, seed)
    if method == "adaptive":
        cfg = AdaptiveConfig(epsilon, alpha, K, n_shots, halve_input=not assume_p_le_half)
        return run(cfg, oracle), oracle
    if method == "mlae":
        T = mlae_T if mlae_T is not None else mlae_T_for(epsilon)
        return run_mlae(MlaeConfig(T, n_shots, alpha=alpha), oracle), oracle
    if method in ("iqae_cp", "iqae_ch"):
        ci = "clopper_pearson" if method == "iqae_cp" else "chernoff_hoeffding"
        return run_iqae(IqaeConfig(epsilon, alpha, n_shots, ci), oracle), oracle
    raise ValueError(f"unknown method {method!r}")


def _execute(task: tuple) -> RunRecord:
    config, method, ei, eps, pi, p, seed, le_half = task
    rec = RunRecord(method=method, eps_index=ei, epsilon=eps, p_index=pi, p_true=p, seed=seed)
    start = time.perf_counter()
    try:
        res, _ = run_single(
            method, p, eps, alpha=config.alpha, K=config.K, n_shots=config.shots,
            seed=seed, exact=config.exact_oracle, assume_p_le_half=le_half,
        )
    except Exception as exc:  # recorded per run, never aborts the grid
        rec.error = f"{type(exc).__name__}: {exc}"
    else:
        rec.p_lo, rec.p_hi = res.interval.lo, res.interval.hi
        rec.n_oracle = res.n_oracle
        rec.total_shots = res.total_shots
        if method == "adaptive":
            rec.classical_ops = res.wall_classical_ops
            rec.r_values = res.r_values
        else:
            rec.classical_ops = res.classical_ops
        rec.result = res
    rec.wall_seconds = time.perf_counter() - start
    return rec


def collect_runs(config: ExperimentConfig, workers: int = 1, keep_results: bool = True) -> list[RunRecord]:
    tasks = _task_list(config)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_execute, tasks, chunksize=8))
    else:
        records = [_execute(t) for t in tasks]
    if not keep_results:
        for r in records:
            r.result = None
    return records


def aggregate(records: list[RunRecord]) -> list[AggregateRow]:
    """One row per (method, epsilon); failed runs only count toward ``failures``."""
    groups: dict[tuple[str, int], list[RunRecord]] = {}
    for rec in records:
        groups.setdefault((rec.method, rec.eps_index), []).append(rec)

    order = {m: i for i, m in enumerate(METHODS)}
    rows = []
    for (method, _), recs in sorted(groups.items(), key=lambda kv: (order[kv[0][0]], kv[0][1])):
        good = sorted((r for r in recs if r.ok), key=lambda r: r.p_index)
        n = len(good)
        mean = (lambda xs: float(math.fsum(xs) / n)) if n else (lambda xs: math.nan)
        with_r = [r for r in good if r.r_values]
        if with_r:
            mean_r = float(math.fsum(np.mean(r.r_values) for r in with_r) / len(with_r))
            worst_r = float(math.fsum(min(r.r_values) for r in with_r) / len(with_r))
        else:
            mean_r = worst_r = None
        rows.append(
            AggregateRow(
                method=method,
                epsilon=recs[0].epsilon,
                run_count=n,
                coverage_fraction=mean([float(r.covered) for r in good]),
                mean_n_oracle=mean([r.n_oracle for r in good]),
                mean_total_shots=mean([r.total_shots for r in good]),
                mean_classical_ops=mean([r.classical_ops for r in good]),
                mean_final_width=mean([r.width for r in good]),
                mean_r=mean_r,
                worst_r=worst_r,
                failures=len(recs) - n,
            )
        )
    return rows


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[AggregateRow]:
    return aggregate(collect_runs(config, workers=workers, keep_results=False))


def failure_fraction(rows: list[AggregateRow]) -> float:
    total = sum(r.run_count + r.failures for r in rows)
    return sum(r.failures for r in rows) / total if total else 0.0


_Y_ALIASES = {"n_oracle": "mean_n_oracle", "classical_ops": "mean_classical_ops"}


def fit_scaling(rows, x_field: str = "epsilon", y_field: str = "mean_n_oracle") -> SlopeFit:
    """Ordinary least squares of ``log10(y)`` on ``log10(x)``."""
    y_field = _Y_ALIASES.get(y_field, y_field)
    pts = [(float(_get(r, x_field)), float(_get(r, y_field))) for r in rows]
    if len({x for x, _ in pts}) < 3:
        raise ValueError(f"need at least 3 distinct {x_field} values, got {len(pts)} rows")
    if any(x <= 0 or y <= 0 or not math.isfinite(y) for x, y in pts):
        raise ValueError("log-log fit needs positive finite values")
    lx = np.log10([x for x, _ in pts])
    ly = np.log10([y for _, y in pts])
    fit = stats.linregress(lx, ly)
    return SlopeFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(min(max(fit.rvalue**2, 0.0), 1.0)),
        x_field=x_field,
        y_field=y_field,
        n_points=len(pts),
    )


def fit_log_loglog(epsilons, values) -> tuple[float, float, float]:
    """Least-squares fit ``y = a L log(L) + b`` with ``L = log(1/eps)``; returns ``(a, b, r2)``."""
    L = np.log(1 / np.asarray(epsilons, dtype=float))
    x = L * np.log(L)
    fit = stats.linregress(x, np.asarray(values, dtype=float))
    return float(fit.slope), float(fit.intercept), float(fit.rvalue**2)


def _get(row, name):
    return row[name] if isinstance(row, dict) else getattr(row, name)


# ---------------------------------------------------------------------------
# reports


def report_metadata(config: ExperimentConfig | None = None) -> dict:
    meta = {"package_version": __version__, "prng": PRNG_NAME, "seed_rule": SEED_RULE}
    if config is not None:
        meta.update(
            scenario=config.scenario,
            master_seed=config.master_seed,
            config_hash=config.config_hash(),
            exact_oracle=config.exact_oracle,
            iqae_label="reference reimplementation",
            mlae_coverage="empirical only (likelihood-ratio interval)",
        )
    return meta


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv_text(rows, fits, metadata) -> str:
    buf = io.StringIO()
    for key in sorted(metadata):
        buf.write(f"# {key}: {metadata[key]}\n")
    for f in fits:
        buf.write(
            f"# fit {f.y_field} vs {f.x_field}: slope={f.slope!r} "
            f"intercept={f.intercept!r} r_squared={f.r_squared!r} n={f.n_points}\n"
        )
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_cell(getattr(row, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def _json_text(rows, fits, metadata) -> str:
    payload = {
        "metadata": metadata,
        "columns": list(CSV_COLUMNS),
        "rows": [{c: getattr(r, c) for c in CSV_COLUMNS} for r in rows],
        "fits": [dataclasses.asdict(f) for f in fits],
    }
    return json.dumps(payload, indent=2, allow_nan=True) + "\n"


def emit_report(rows, fits=(), fmt: str = "csv", path=None, metadata: dict | None = None) -> str:
    """Serialise rows (and fits) to CSV or JSON; writes ``path`` when given."""
    metadata = report_metadata() if metadata is None else metadata
    if fmt == "csv":
        text = _csv_text(rows, fits, metadata)
    elif fmt == "json":
        text = _json_text(rows, fits, metadata)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    if path is not None:
        path = Path(path)
        try:
            path.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text


def _parse_cell(col: str, s: str):
    if col == "method":
        return s
    if s == "":
        return None
    if col in ("run_count", "failures"):
        return int(s)
    return float(s)


def load_report(path) -> tuple[list[AggregateRow], dict]:
    """Read a CSV or JSON report written by :func:`emit_report`."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read report {path}: {exc}") from exc
    if text.lstrip().startswith("{"):
        payload = json.loads(text)
        rows = [AggregateRow(**{c: r[c] for c in CSV_COLUMNS}) for r in payload["rows"]]
        return rows, payload.get("metadata", {})
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            if not key.startswith("fit "):
                meta[key] = value
        elif line:
            body.append(line)
    reader = csv.DictReader(body)
    rows = [AggregateRow(**{c: _parse_cell(c, r[c]) for c in CSV_COLUMNS}) for r in reader]
    return rows, meta
