"""Trial runner, phase-transition sweeps and curve output.

A trial generates one synthetic instance, runs a solver, and scores the
estimate against the stored ground truth over all entries: success means
relative Frobenius error below the tolerance (default 1e-3).  A phase
point scans an ascending grid of corruption (or erasure) rates and returns
the largest value at which every trial succeeds, stopping at the first
grid value with at least one failure; if even the smallest value fails it
returns the below-grid sentinel -1.0.  A sweep evaluates one phase point
per position of a horizontal grid per solver.

Seeding: the trial seed is ``blake2b(f"{seed_base}|{x_axis}={x!r}|trial={t}")``
reduced to 64 bits.  The solver is deliberately absent from the hash, so
curves being compared see identical instances.  Results are therefore
byte-reproducible and independent of worker scheduling.

CSV emission uses the fixed header ``solver,x,y,trials,failures,lambda``:
one row per (solver, x position), where y is the phase point, trials is
the per-point trial count, failures is the failure count observed at the
first failing grid value of the scan (0 if the scan reached the top of the
grid), and lambda is the inner weight used at that position.
"""

from __future__ import annotations

import hashlib
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import alm, sgmca, synthgen
from .errors import ArgumentError, NumericError

SOLVERS = ("alm_only", "sgmca")
X_AXES = ("density", "size")
SCAN_AXES = ("error_rate", "erasure_rate")

BELOW_GRID = -1.0  # sentinel: even the smallest scanned value failed

CSV_HEADER = "solver,x,y,trials,failures,lambda"


def default_lambda(n: int, rank_cap: int | None = None) -> float:
    """Neutral sparse-term weight: 1/sqrt(n), or 0.02 when the rank is capped."""
    if rank_cap is not None:
        return 0.02
    return 1.0 / float(np.sqrt(n))


@dataclass(frozen=True)
class TrialSpec:
    instance: synthgen.InstanceSpec
    solver: str
    greedy: sgmca.GreedyConfig
    success_tol: float = 1e-3

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ArgumentError(f"solver must be one of {SOLVERS}")
        if self.success_tol <= 0:
            raise ArgumentError("success_tol must be positive")


@dataclass(frozen=True)
class TrialResult:
    success: bool
    rel_error: float
    outer_iters: int
    total_svds: int
    wall_time: float
    final_density: float
    pruned_clean: int
    pruned_corrupt: int
    failure_reason: str = ""


def run_trial(spec: TrialSpec) -> TrialResult:
    """Generate the instance, run the solver, score against ground truth."""
    instance = synthgen.generate(spec.instance)
    mask = instance.observed.mask
    start = time.perf_counter()
    try:
        if spec.solver == "alm_only":
            estimate, _, report = alm.solve(instance.observed, spec.greedy.inner)
            outer_iters = 1
            total_svds = report.svd_count
            final_mask = mask
        else:
            result = sgmca.solve(instance.observed, spec.greedy)
            estimate = result.a
            outer_iters = result.outer_iterations
            total_svds = sum(step.report.svd_count for step in result.history)
            final_mask = result.omega
    except NumericError as exc:
        return TrialResult(
            success=False,
            rel_error=float("inf"),
            outer_iters=0,
            total_svds=0,
            wall_time=time.perf_counter() - start,
            final_density=mask.density,
            pruned_clean=0,
            pruned_corrupt=0,
            failure_reason=str(exc),
        )
    wall = time.perf_counter() - start

    rel_error = float(
        np.linalg.norm(estimate - instance.truth) / np.linalg.norm(instance.truth)
    )
    removed = np.setdiff1d(mask.flat, final_mask.flat, assume_unique=True)
    pruned_corrupt = int(
        np.isin(removed, instance.corruption_support.flat, assume_unique=True).sum()
    )
    return TrialResult(
        success=rel_error < spec.success_tol,
        rel_error=rel_error,
        outer_iters=outer_iters,
        total_svds=total_svds,
        wall_time=wall,
        final_density=final_mask.density,
        pruned_clean=int(removed.size) - pruned_corrupt,
        pruned_corrupt=pruned_corrupt,
    )


def derive_seed(seed_base: int, x_axis: str, x, trial: int) -> int:
    """Stable 64-bit trial seed from the point coordinates (solver-blind)."""
    text = f"{seed_base}|{x_axis}={x!r}|trial={trial}"
    digest = hashlib.blake2b(text.encode("ascii"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _run_trials(specs, executor=None) -> list[TrialResult]:
    if executor is None:
        return [run_trial(s) for s in specs]
    return list(executor.map(run_trial, specs))


@dataclass(frozen=True)
class ProbeStat:
    """Outcome of all trials at one scanned grid value."""

    value: float
    trials: int
    failures: int


def _scan(make_spec, grid, trials: int, executor=None) -> tuple[float, list[ProbeStat]]:
    """Ascending scan; stops at the first grid value with a failure."""
    best = BELOW_GRID
    probes: list[ProbeStat] = []
    for value in grid:
        results = _run_trials([make_spec(value, t) for t in range(trials)], executor)
        failures = sum(1 for r in results if not r.success)
        probes.append(ProbeStat(value=float(value), trials=trials, failures=failures))
        if failures:
            break
        best = float(value)
    return best, probes


def phase_point(
    n: int,
    rank: int,
    density: float,
    error_grid,
    trials: int,
    solver: str,
    greedy: sgmca.GreedyConfig,
    seeds,
    error_model: str = "additive_gaussian",
    success_tol: float = 1e-3,
    executor=None,
) -> float:
    """Largest grid error rate at which all trials succeed, or the sentinel.

    ``seeds`` must provide one instance seed per trial; the same seed is
    reused across the scanned grid so corruption grows on a fixed matrix
    and mask.
    """
    value, _ = _phase_point_stats(
        n, rank, density, error_grid, trials, solver, greedy, seeds,
        error_model, success_tol, executor,
    )
    return value


def _phase_point_stats(
    n, rank, density, error_grid, trials, solver, greedy, seeds,
    error_model="additive_gaussian", success_tol=1e-3, executor=None,
):
    grid = [float(v) for v in error_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ArgumentError("error_grid must be strictly increasing")
    seeds = list(seeds)
    if len(seeds) < trials:
        raise ArgumentError("need one seed per trial")

    def make_spec(error_rate, t):
        return TrialSpec(
            instance=synthgen.InstanceSpec(
                n=n, rank=rank, density=density, error_rate=error_rate,
                error_model=error_model, seed=seeds[t],
            ),
            solver=solver,
            greedy=greedy,
            success_tol=success_tol,
        )

    return _scan(make_spec, grid, trials, executor)


def _erasure_point_stats(
    n, rank, error_rate, erasure_grid, trials, solver, greedy, seeds,
    error_model="additive_gaussian", success_tol=1e-3, executor=None,
):
    """Ascending scan over erasure rates (density = 1 - erasure) at a fixed error rate."""
    grid = [float(v) for v in erasure_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ArgumentError("erasure_grid must be strictly increasing")
    seeds = list(seeds)
    if len(seeds) < trials:
        raise ArgumentError("need one seed per trial")

    def make_spec(erasure, t):
        return TrialSpec(
            instance=synthgen.InstanceSpec(
                n=n, rank=rank, density=1.0 - erasure, error_rate=error_rate,
                error_model=error_model, seed=seeds[t],
            ),
            solver=solver,
            greedy=greedy,
            success_tol=success_tol,
        )

    return _scan(make_spec, grid, trials, executor)


def erasure_phase_point(
    n, rank, error_rate, erasure_grid, trials, solver, greedy, seeds,
    error_model="additive_gaussian", success_tol=1e-3, executor=None,
) -> float:
    """Largest grid erasure rate at which all trials succeed, or the sentinel."""
    value, _ = _erasure_point_stats(
        n, rank, error_rate, erasure_grid, trials, solver, greedy, seeds,
        error_model, success_tol, executor,
    )
    return value


@dataclass(frozen=True)
class SweepSpec:
    """A family of phase points: one horizontal grid, one admissibility scan.

    ``x_axis`` is ``density`` (fixed size ``n``) or ``size`` (fixed
    ``density`` or ``error_rate``, depending on ``scan_axis``).  The scan
    axis is ``error_rate`` (admissible corruption) or ``erasure_rate``
    (admissible erasure at fixed ``error_rate``).  When ``lam`` is None the
    inner weight defaults per position to :func:`default_lambda`.
    """

    rank: int
    solvers: tuple[str, ...]
    x_axis: str
    x_grid: tuple
    scan_axis: str
    scan_grid: tuple
    greedy: sgmca.GreedyConfig
    n: int | None = None
    density: float | None = None
    error_rate: float | None = None
    error_model: str = "additive_gaussian"
    trials_per_point: int = 10
    success_tol: float = 1e-3
    seed_base: int = 0
    lam: float | None = None

    def __post_init__(self):
        if not self.solvers:
            raise ArgumentError("at least one solver is required")
        for solver in self.solvers:
            if solver not in SOLVERS:
                raise ArgumentError(f"unknown solver {solver!r}")
        if self.x_axis not in X_AXES:
            raise ArgumentError(f"x_axis must be one of {X_AXES}")
        if self.scan_axis not in SCAN_AXES:
            raise ArgumentError(f"scan_axis must be one of {SCAN_AXES}")
        if len(self.x_grid) < 1 or len(self.scan_grid) < 1:
            raise ArgumentError("grids must be non-empty")
        for grid in (self.x_grid, self.scan_grid):
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ArgumentError("grids must be strictly increasing")
        if self.trials_per_point < 1:
            raise ArgumentError("trials_per_point must be at least 1")
        if self.x_axis == "density":
            if self.n is None:
                raise ArgumentError("x_axis='density' requires a fixed n")
            if self.scan_axis != "error_rate":
                raise ArgumentError("x_axis='density' scans error_rate")
        else:
            if self.scan_axis == "error_rate" and self.density is None:
                raise ArgumentError("size sweep scanning error_rate requires a fixed density")
            if self.scan_axis == "erasure_rate" and self.error_rate is None:
                raise ArgumentError("size sweep scanning erasure_rate requires a fixed error_rate")


@dataclass(frozen=True)
class CurvePoint:
    solver: str
    x: float
    y: float
    trials: int
    failures: int
    lam: float


@dataclass(frozen=True)
class CurveTable:
    x_axis: str
    scan_axis: str
    points: tuple[CurvePoint, ...]


def _point_greedy(spec: SweepSpec, n: int) -> sgmca.GreedyConfig:
    lam = spec.lam if spec.lam is not None else default_lambda(n, spec.greedy.inner.rank_cap)
    return replace(spec.greedy, inner=replace(spec.greedy.inner, lam=lam))


def sweep(spec: SweepSpec, workers: int = 1, on_point=None) -> CurveTable:
    """One phase point per x position per solver, in deterministic order.

    Rows are grouped by solver (in the order given) and ascending x.  With
    ``workers > 1`` the trials of each probe run on a spawned process pool
    (results are merged in submission order, so output is identical to the
    serial run).  ``on_point`` is called with each finished CurvePoint,
    which lets callers flush partial results.
    """
    executor = None
    if workers > 1:
        os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
        os.environ.setdefault("OMP_NUM_THREADS", "1")
        import multiprocessing

        executor = ProcessPoolExecutor(
            max_workers=workers, mp_context=multiprocessing.get_context("spawn")
        )
    try:
        points = []
        for solver in spec.solvers:
            for x in spec.x_grid:
                seeds = [
                    derive_seed(spec.seed_base, spec.x_axis, x, t)
                    for t in range(spec.trials_per_point)
                ]
                n = int(x) if spec.x_axis == "size" else int(spec.n)
                greedy = _point_greedy(spec, n)
                if spec.scan_axis == "error_rate":
                    density = float(spec.density) if spec.x_axis == "size" else float(x)
                    value, probes = _phase_point_stats(
                        n, spec.rank, density, spec.scan_grid, spec.trials_per_point,
                        solver, greedy, seeds, spec.error_model, spec.success_tol,
                        executor,
                    )
                else:
                    value, probes = _erasure_point_stats(
                        n, spec.rank, float(spec.error_rate), spec.scan_grid,
                        spec.trials_per_point, solver, greedy, seeds,
                        spec.error_model, spec.success_tol, executor,
                    )
                failures = probes[-1].failures
                point = CurvePoint(
                    solver=solver,
                    x=float(x),
                    y=value,
                    trials=spec.trials_per_point,
                    failures=failures,
                    lam=greedy.inner.lam,
                )
                points.append(point)
                if on_point is not None:
                    on_point(point)
        return CurveTable(x_axis=spec.x_axis, scan_axis=spec.scan_axis, points=tuple(points))
    finally:
        if executor is not None:
            executor.shutdown()


def csv_row(point: CurvePoint) -> str:
    return (
        f"{point.solver},{point.x!r},{point.y!r},{point.trials},"
        f"{point.failures},{point.lam!r}"
    )


def parse_csv(text: str) -> list[CurvePoint]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ArgumentError("unrecognized curve CSV header")
    points = []
    for line in lines[1:]:
        solver, x, y, trials, failures, lam = line.split(",")
        points.append(
            CurvePoint(
                solver=solver, x=float(x), y=float(y), trials=int(trials),
                failures=int(failures), lam=float(lam),
            )
        )
    return points


def emit(table: CurveTable, format: str, path) -> None:
    """Write the curve table as ``csv`` or as a vector-graphics ``plot``."""
    if not table.points:
        raise ArgumentError("refusing to emit an empty curve table")
    if format == "csv":
        rows = [CSV_HEADER] + [csv_row(p) for p in table.points]
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(rows) + "\n")
    elif format == "plot":
        from . import figures

        figures.render_curves(table, path)
    else:
        raise ArgumentError("format must be 'csv' or 'plot'")
