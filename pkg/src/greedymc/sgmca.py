"""Greedy observation pruning wrapped around the convex solver.

Each outer iteration re-solves the completion problem on the current
observation set, then expels every observed entry whose residual against
its estimate exceeds a threshold.  The first threshold is a fraction of
the largest observed residual; later thresholds decay geometrically.
Entries pruned this way are treated as erasures from then on, which lets
the convex solver recover matrices that a single pass cannot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import alm
from .errors import ArgumentError
from .masking import MaskedMatrix, ObservationMask

STATUS_CONVERGED = "converged"    # nothing pruned and the inner solver converged
STATUS_MAX_OUTER = "max_outer"    # outer iteration budget exhausted
STATUS_OVER_PRUNED = "over_pruned"  # pruning would drop density below the guard


@dataclass(frozen=True)
class GreedyConfig:
    """Outer-loop parameters around an inner solver configuration.

    The first threshold is ``t1_factor`` times the largest observed
    residual of the first fit; each later threshold is ``decay`` times the
    previous one.  ``min_density`` guards against pruning collapse.
    """

    inner: alm.AlmConfig
    t1_factor: float = 0.3
    decay: float = 0.65
    max_outer: int = 10
    min_density: float = 0.01

    def __post_init__(self):
        if self.t1_factor <= 0:
            raise ArgumentError("t1_factor must be positive")
        if not 0 < self.decay < 1:
            raise ArgumentError("decay must be in (0, 1)")
        if self.max_outer < 1:
            raise ArgumentError("max_outer must be at least 1")
        if not 0 <= self.min_density <= 1:
            raise ArgumentError("min_density must be in [0, 1]")


@dataclass(frozen=True)
class GreedyStep:
    """Trace of one outer iteration (mask state after its prune)."""

    omega: ObservationMask
    threshold: float
    removed: int
    report: alm.AlmReport

    @property
    def omega_size(self) -> int:
        return self.omega.size


@dataclass
class GreedyState:
    """Live outer-loop state: current set, estimate, threshold, counter."""

    omega: ObservationMask
    a: np.ndarray
    t: float
    outer_k: int
    history: list[GreedyStep] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class GreedyResult:
    """Final estimate, surviving observation set, trace and stop status."""

    a: np.ndarray
    omega: ObservationMask
    history: tuple[GreedyStep, ...]
    status: str
    detail: str = ""

    @property
    def outer_iterations(self) -> int:
        return len(self.history)


def first_threshold(a1: np.ndarray, m: MaskedMatrix, t1_factor: float) -> float:
    """``t1_factor`` times the largest |estimate - observation| on the mask."""
    if m.mask.size < 1:
        raise ArgumentError("observation mask is empty")
    resid = np.abs(a1 - m.values).ravel()[m.mask.flat]
    return float(t1_factor * resid.max())


def prune(
    omega: ObservationMask, a: np.ndarray, m: MaskedMatrix, t: float
) -> tuple[ObservationMask, int]:
    """Drop the entries of ``omega`` whose residual strictly exceeds ``t``."""
    if t < 0:
        raise ArgumentError("threshold must be non-negative")
    resid = np.abs(a - m.values).ravel()[omega.flat]
    kept = omega.flat[resid <= t]
    removed = omega.size - kept.size
    return ObservationMask(omega.rows, omega.cols, kept), removed


def solve(m: MaskedMatrix, cfg: GreedyConfig) -> GreedyResult:
    """Run the solve / threshold / prune loop.

    Stops when the outer budget is exhausted, when an iteration prunes
    nothing while its inner solve converged (the natural fixed point), or
    when pruning would push the observation density below ``min_density``.
    In the over-pruned case the destructive prune is not committed: the
    returned set is the one the final estimate was solved on.
    """
    state = GreedyState(omega=m.mask, a=m.values, t=float("nan"), outer_k=0)
    status = STATUS_MAX_OUTER
    detail = ""
    for outer in range(1, cfg.max_outer + 1):
        state.outer_k = outer
        sub = MaskedMatrix(m.values, state.omega)
        a, _, report = alm.solve(sub, cfg.inner)
        state.a = a
        if outer == 1:
            state.t = first_threshold(a, sub, cfg.t1_factor)
        else:
            state.t = cfg.decay * state.t

        pruned, removed = prune(state.omega, a, sub, state.t)
        if pruned.density < cfg.min_density:
            status = STATUS_OVER_PRUNED
            detail = (
                f"iteration {outer} would prune {removed} entries, dropping density "
                f"to {pruned.density:.4g} < {cfg.min_density:.4g}; prune not applied"
            )
            state.history.append(GreedyStep(state.omega, state.t, 0, report))
            break
        state.omega = pruned
        state.history.append(GreedyStep(state.omega, state.t, removed, report))
        if removed == 0 and report.converged:
            status = STATUS_CONVERGED
            break
    return GreedyResult(
        a=state.a,
        omega=state.omega,
        history=tuple(state.history),
        status=status,
        detail=detail,
    )
