"""Command line entry point: ``estimate``, ``bench`` and ``fit`` subcommands.

Exit codes: 0 success, 2 configuration error, 3 more than 10% of bench runs failed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .bench import (
    METHODS,
    SCENARIOS,
    ExperimentConfig,
    emit_report,
    failure_fraction,
    fit_scaling,
    load_report,
    report_metadata,
    run_experiment,
    run_single,
)
from .oracle import PRNG_NAME

EXIT_OK, EXIT_CONFIG, EXIT_FAILURES = 0, 2, 3
FAILURE_THRESHOLD = 0.10


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _float_list(s: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in s.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {s!r}") from exc


def _str_list(s: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in s.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adaptive-qae", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    est = sub.add_parser("estimate", help="estimate one amplitude and print the result as JSON")
    est.add_argument("--p", type=float, required=True, help="hidden good-state probability")
    est.add_argument("--epsilon", type=float, required=True)
    est.add_argument("--alpha", type=float, default=0.05)
    est.add_argument("--K", type=int, default=3)
    est.add_argument("--shots", type=int, default=100)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--method", choices=METHODS, default="adaptive")
    est.add_argument("--exact-oracle", action="store_true")
    est.add_argument("--assume-p-le-half", action="store_true")
    est.add_argument("--T", type=int, default=None, help="MLAE schedule length (default from epsilon)")

    bench = sub.add_parser("bench", help="run an experiment grid and write a report")
    bench.add_argument("--scenario", choices=sorted(SCENARIOS), required=True)
    bench.add_argument("--out", required=True)
    bench.add_argument("--format", choices=("csv", "json"), default="csv")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--epsilons", type=_float_list, default=None)
    bench.add_argument("--methods", type=_str_list, default=None)
    bench.add_argument("--n-p-samples", type=int, default=100)
    bench.add_argument("--shots", type=int, default=None)
    bench.add_argument("--exact-oracle", action="store_true")
    bench.add_argument("--workers", type=int, default=1)

    fit = sub.add_parser("fit", help="log-log slope of a report column against epsilon")
    fit.add_argument("--in", dest="path", required=True)
    fit.add_argument("--x", choices=("epsilon",), default="epsilon")
    fit.add_argument("--y", choices=("n_oracle", "classical_ops"), required=True)
    fit.add_argument("--method", default=None, help="restrict to one method (required if several)")
    return parser


def _estimate(args) -> int:
    res, oracle = run_single(
        args.method, args.p, args.epsilon, alpha=args.alpha, K=args.K, n_shots=args.shots,
        seed=args.seed, exact=args.exact_oracle, assume_p_le_half=args.assume_p_le_half,
        mlae_T=args.T,
    )
    out = {
        "method": args.method,
        "p_lo": res.interval.lo,
        "p_hi": res.interval.hi,
        "width": res.interval.hi - res.interval.lo,
        "n_oracle": res.n_oracle,
        "total_shots": res.total_shots,
        "oracle": "exact" if args.exact_oracle else PRNG_NAME,
        "seed": args.seed,
    }
    if args.method == "adaptive":
        out["classical_ops"] = res.wall_classical_ops
        out["stopped_at"] = res.stopped_at
        out["T"] = res.T
        out["rounds"] = [
            {"t": r.t, "m": r.m, "r": r.r, "k_hat": r.k_hat, "N": r.N, "X": r.X, "j": r.j}
            for r in res.rounds
        ]
    else:
        out["classical_ops"] = res.classical_ops
        out["estimate"] = res.estimate
        if args.method.startswith("iqae"):
            out["label"] = "reference reimplementation"
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _bench(args) -> int:
    kwargs = dict(
        scenario=args.scenario, master_seed=args.seed, n_p_samples=args.n_p_samples,
        n_shots=args.shots, methods=args.methods, exact_oracle=args.exact_oracle,
    )
    if args.epsilons is not None:
        kwargs["epsilons"] = args.epsilons
    config = ExperimentConfig(**kwargs)
    rows = run_experiment(config, workers=args.workers)
    emit_report(rows, (), args.format, args.out, report_metadata(config))
    frac = failure_fraction(rows)
    if frac > FAILURE_THRESHOLD:
        print(f"{frac:.1%} of runs failed", file=sys.stderr)
        return EXIT_FAILURES
    return EXIT_OK


def _fit(args) -> int:
    rows, _ = load_report(args.path)
    methods = sorted({r.method for r in rows})
    if args.method is not None:
        rows = [r for r in rows if r.method == args.method]
    elif len(methods) > 1:
        raise ValueError(f"report holds several methods {methods}; pass --method")
    rows = [r for r in rows if r.run_count > 0]
    fit = fit_scaling(rows, args.x, args.y)
    print(json.dumps(dataclasses.asdict(fit), indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"estimate": _estimate, "bench": _bench, "fit": _fit}[args.command]
    try:
        return handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
