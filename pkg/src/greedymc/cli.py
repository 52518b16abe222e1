"""Command-line interface.

Subcommands:

* ``generate`` — write a synthetic instance file.
* ``solve``    — run one solver on an instance file and print diagnostics.
* ``sweep``    — run a sweep described by a JSON config; write CSV and
  optionally a plot.
* ``compare``  — sweep with both solvers on the same grid.

Exit codes: 0 success, 1 argument error, 2 numeric failure, 3 I/O error.
All randomness is controlled by ``--seed`` / the config's ``seed_base``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace

import numpy as np

from . import alm, benchlab, sgmca, synthgen
from .errors import ArgumentError, NumericError

_MODEL_BY_FLAG = {"gauss": "additive_gaussian", "uniform": "uniform_range"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argument errors must exit 1, not argparse's 2
        raise ArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="greedymc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic instance file")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--rank", type=int, required=True)
    gen.add_argument("--density", type=float, required=True)
    gen.add_argument("--error-rate", type=float, default=0.0)
    gen.add_argument("--model", choices=sorted(_MODEL_BY_FLAG), default="gauss")
    gen.add_argument("--replace-values", action="store_true",
                     help="gauss model: replace entries instead of adding to them")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_generate)

    slv = sub.add_parser("solve", help="run one solver on an instance file")
    slv.add_argument("--in", dest="infile", required=True)
    slv.add_argument("--solver", choices=("alm", "sgmca"), default="sgmca")
    slv.add_argument("--lambda", dest="lam", type=float, default=None,
                     help="sparse-term weight (default: 1/sqrt(n), 0.02 with --rank-cap)")
    slv.add_argument("--rank-cap", type=int, default=None)
    slv.add_argument("--max-outer", type=int, default=10)
    slv.add_argument("--tol", type=float, default=1e-7)
    slv.add_argument("--max-iter", type=int, default=1000)
    slv.add_argument("--report", default=None, help="write a JSON report here")
    slv.add_argument("--dump-estimate", default=None,
                     help="write the estimate as raw little-endian float64")
    slv.set_defaults(func=cmd_solve)

    swp = sub.add_parser("sweep", help="run a sweep from a JSON config")
    swp.add_argument("--config", required=True)
    swp.add_argument("--out-csv", required=True)
    swp.add_argument("--out-plot", default=None)
    swp.add_argument("--workers", type=int, default=1)
    swp.set_defaults(func=cmd_sweep, force_both_solvers=False)

    cmp_ = sub.add_parser("compare", help="sweep both solvers on the same grid")
    cmp_.add_argument("--config", required=True)
    cmp_.add_argument("--out-csv", required=True)
    cmp_.add_argument("--out-plot", default=None)
    cmp_.add_argument("--workers", type=int, default=1)
    cmp_.set_defaults(func=cmd_sweep, force_both_solvers=True)

    return parser


def cmd_generate(args) -> int:
    spec = synthgen.InstanceSpec(
        n=args.n,
        rank=args.rank,
        density=args.density,
        error_rate=args.error_rate,
        error_model=_MODEL_BY_FLAG[args.model],
        seed=args.seed,
        additive=not args.replace_values,
    )
    instance = synthgen.generate(spec)
    synthgen.write_instance(instance, args.out)
    print(f"wrote {args.out}: n={spec.n} rank={spec.rank} "
          f"|mask|={instance.observed.mask.size} "
          f"|corrupted|={instance.corruption_support.size}")
    return 0


def cmd_solve(args) -> int:
    instance = synthgen.read_instance(args.infile)
    n = instance.spec.n
    lam = args.lam if args.lam is not None else benchlab.default_lambda(n, args.rank_cap)
    inner = alm.AlmConfig(lam=lam, tol=args.tol, max_iter=args.max_iter,
                          rank_cap=args.rank_cap)
    greedy = sgmca.GreedyConfig(inner=inner, max_outer=args.max_outer)

    if args.solver == "alm":
        estimate, _, report = alm.solve(instance.observed, inner)
        outer_iters = 1
        total_svds = report.svd_count
        final_density = instance.observed.mask.density
        status = "converged" if report.converged else "max_iter"
    else:
        result = sgmca.solve(instance.observed, greedy)
        estimate = result.a
        outer_iters = result.outer_iterations
        total_svds = sum(step.report.svd_count for step in result.history)
        final_density = result.omega.density
        status = result.status

    rel_error = float(
        np.linalg.norm(estimate - instance.truth) / np.linalg.norm(instance.truth)
    )
    diagnostics = {
        "solver": args.solver,
        "lambda": lam,
        "rel_error": rel_error,
        "status": status,
        "outer_iters": outer_iters,
        "total_svds": total_svds,
        "final_density": final_density,
    }
    print(f"rel_error={rel_error!r}")
    for key in ("solver", "lambda", "status", "outer_iters", "total_svds", "final_density"):
        print(f"{key}={diagnostics[key]}")
    if args.report:
        with open(args.report, "w", encoding="ascii") as fh:
            json.dump(diagnostics, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.dump_estimate:
        with open(args.dump_estimate, "wb") as fh:
            fh.write(np.ascontiguousarray(estimate, dtype="<f8").tobytes())
    return 0


def _alm_config_from(data: dict) -> alm.AlmConfig:
    known = {
        "lambda": "lam", "lam": "lam", "mu0_factor": "mu0_factor",
        "rho_base": "rho_base", "rho_slope": "rho_slope", "tol": "tol",
        "max_iter": "max_iter", "rank_cap": "rank_cap",
        "inf_norm_mode": "inf_norm_mode",
    }
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            raise ArgumentError(f"unknown alm config field {key!r}")
        kwargs[known[key]] = value
    # the per-position default is substituted during the sweep
    kwargs.setdefault("lam", 1.0)
    return alm.AlmConfig(**kwargs)


def _greedy_config_from(data: dict, inner: alm.AlmConfig) -> sgmca.GreedyConfig:
    allowed = {"t1_factor", "decay", "max_outer", "min_density"}
    unknown = set(data) - allowed
    if unknown:
        raise ArgumentError(f"unknown greedy config fields: {sorted(unknown)}")
    return sgmca.GreedyConfig(inner=inner, **data)


def load_sweep_config(path, force_both_solvers: bool = False) -> benchlab.SweepSpec:
    """Build a SweepSpec from a JSON file.

    Every field of the sweep, greedy and alm configurations is
    representable; ``alm.lambda`` may be omitted or null, in which case the
    per-position default applies (and is recorded in the CSV).
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ArgumentError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ArgumentError("sweep config must be a JSON object")

    alm_data = dict(data.pop("alm", {}))
    lam = alm_data.pop("lambda", alm_data.pop("lam", None))
    inner = _alm_config_from(alm_data)
    greedy = _greedy_config_from(dict(data.pop("greedy", {})), inner)

    solvers = tuple(data.pop("solvers", ("sgmca",)))
    if force_both_solvers:
        solvers = ("alm_only", "sgmca")
    fields = {
        "rank", "x_axis", "x_grid", "scan_axis", "scan_grid", "n", "density",
        "error_rate", "error_model", "trials_per_point", "success_tol", "seed_base",
    }
    unknown = set(data) - fields
    if unknown:
        raise ArgumentError(f"unknown sweep config fields: {sorted(unknown)}")
    for grid_key in ("x_grid", "scan_grid"):
        if grid_key in data:
            data[grid_key] = tuple(data[grid_key])
    return benchlab.SweepSpec(solvers=solvers, greedy=greedy, lam=lam, **data)


def cmd_sweep(args) -> int:
    spec = load_sweep_config(args.config, force_both_solvers=args.force_both_solvers)
    with open(args.out_csv, "w", encoding="ascii", newline="\n") as fh:
        fh.write(benchlab.CSV_HEADER + "\n")
        fh.flush()

        def flush_point(point):
            fh.write(benchlab.csv_row(point) + "\n")
            fh.flush()
            print(benchlab.csv_row(point))

        print(benchlab.CSV_HEADER)
        table = benchlab.sweep(spec, workers=args.workers, on_point=flush_point)
    if args.out_plot:
        benchlab.emit(table, "plot", args.out_plot)
    return 0


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
