"""Inexact augmented-Lagrangian solver for robust masked-matrix completion.

Minimizes  ||A||_* + lam * |E|_1 + <Y, R> + (mu/2) |R|_2^2  with
R = M - A - E, where M is known only on the observation mask.  One
alternating update is performed per penalty level; the penalty weight mu
grows geometrically.  Off the mask, E carries the whole unshrunk residual,
which keeps R and the dual variable Y identically zero there, so erased
entries contribute nothing to any term.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .masking import MaskedMatrix, project
from .numkit import inner_product, nuclear_norm, operator_norms, shrink, svd

MU_CAP = 1e12  # numeric safety: mu stops growing here (a warning is emitted once)

INF_NORM_MODES = ("operator", "elementwise")


@dataclass(frozen=True)
class AlmConfig:
    """Solver parameters.

    ``lam`` weights the sparse-error term.  The penalty starts at
    ``mu0_factor / ||M||_2`` and grows by ``rho_base + rho_slope * density``
    per iteration.  ``rank_cap`` truncates the spectrum to the top r values
    before shrinkage.  ``inf_norm_mode`` selects how ||M||_inf is read in
    the dual initialization: ``operator`` (max absolute row sum) or
    ``elementwise`` (max |M_ij|, matching a widely circulated legacy
    implementation).
    """

    lam: float
    mu0_factor: float = 0.3
    rho_base: float = 1.1
    rho_slope: float = 0.5
    tol: float = 1e-7
    max_iter: int = 1000
    rank_cap: int | None = None
    inf_norm_mode: str = "operator"

    def __post_init__(self):
        if self.lam <= 0:
            raise ArgumentError("lam must be positive")
        if self.mu0_factor <= 0:
            raise ArgumentError("mu0_factor must be positive")
        # mu must grow for every density in [0, 1]
        if self.rho_base <= 1 or self.rho_base + self.rho_slope <= 1:
            raise ArgumentError("rho_base + rho_slope * density must exceed 1 on [0, 1]")
        if self.tol <= 0:
            raise ArgumentError("tol must be positive")
        if self.max_iter < 1:
            raise ArgumentError("max_iter must be at least 1")
        if self.rank_cap is not None and self.rank_cap < 1:
            raise ArgumentError("rank_cap must be a positive integer")
        if self.inf_norm_mode not in INF_NORM_MODES:
            raise ArgumentError(f"inf_norm_mode must be one of {INF_NORM_MODES}")

    def rho(self, density: float) -> float:
        return self.rho_base + self.rho_slope * density


@dataclass
class AlmState:
    """Iterate of the solver: estimates, dual variable, penalty, counter."""

    a: np.ndarray
    e: np.ndarray
    y: np.ndarray
    mu: float
    k: int
    converged: bool
    rel_residual: float


@dataclass(frozen=True)
class AlmReport:
    iterations: int
    final_residual: float
    svd_count: int
    converged: bool


def init_state(m: MaskedMatrix, cfg: AlmConfig) -> AlmState:
    """Initial iterate: A = E = 0, Y = M / max(||M||_2, ||M||_inf / lam)."""
    if m.mask.size < 1:
        raise ArgumentError("observation mask is empty")
    values = m.values
    spectral, op_inf = operator_norms(values)
    if spectral == 0.0:
        raise ArgumentError("observed entries are all zero; dual scale is undefined")
    inf_norm = op_inf if cfg.inf_norm_mode == "operator" else float(np.max(np.abs(values)))
    y0 = values / max(spectral, inf_norm / cfg.lam)
    zero = np.zeros_like(values)
    return AlmState(
        a=zero,
        e=zero.copy(),
        y=y0,
        mu=cfg.mu0_factor / spectral,
        k=0,
        converged=False,
        rel_residual=float("inf"),
    )


def _spectral_shrink(w: np.ndarray, threshold: float, rank_cap: int | None) -> np.ndarray:
    """Singular value shrinkage of ``w``, optionally truncated to rank_cap."""
    fac = svd(w)
    s = fac.singular_values
    if rank_cap is not None:
        s = s.copy()
        s[rank_cap:] = 0.0
    s = np.maximum(s - threshold, 0.0)
    keep = int(np.count_nonzero(s))
    if keep == 0:
        return np.zeros_like(w)
    return (fac.u[:, :keep] * s[:keep]) @ fac.vt[:keep]


def step(state: AlmState, m: MaskedMatrix, cfg: AlmConfig) -> AlmState:
    """One alternating update at the current penalty level.

    Factor W = M - E + Y/mu, shrink its spectrum by 1/mu to get the new A;
    soft-threshold the data misfit by lam/mu on the mask to get the new E
    (off the mask E absorbs the misfit unshrunk); ascend the dual by mu
    times the residual; grow mu.
    """
    if state.converged:
        raise ArgumentError("state has already converged")
    values = m.values
    observed = m.mask.boolean()
    mu = state.mu

    w = values - state.e + state.y / mu
    a_new = _spectral_shrink(w, 1.0 / mu, cfg.rank_cap)

    g = values - a_new + state.y / mu
    e_new = np.where(observed, shrink(g, cfg.lam / mu), g)

    r = values - a_new - e_new  # exactly zero off the mask
    y_new = state.y + mu * r
    rel = float(np.linalg.norm(r) / np.linalg.norm(values))

    mu_next = mu * cfg.rho(m.mask.density)
    if mu_next >= MU_CAP:
        if mu < MU_CAP:
            warnings.warn(
                f"penalty weight reached the cap {MU_CAP:g}; further growth is clamped",
                RuntimeWarning,
                stacklevel=2,
            )
        mu_next = MU_CAP

    return AlmState(
        a=a_new,
        e=e_new,
        y=y_new,
        mu=mu_next,
        k=state.k + 1,
        converged=rel < cfg.tol,
        rel_residual=rel,
    )


def solve(m: MaskedMatrix, cfg: AlmConfig) -> tuple[np.ndarray, np.ndarray, AlmReport]:
    """Iterate :func:`step` until the masked residual drops below tol.

    Stops at ``cfg.max_iter`` with ``converged=False`` in the report (not an
    error) and returns the last iterate either way.  The svd count includes
    the one factorization used to scale the initial dual variable.
    """
    state = init_state(m, cfg)
    while not state.converged and state.k < cfg.max_iter:
        state = step(state, m, cfg)
    report = AlmReport(
        iterations=state.k,
        final_residual=state.rel_residual,
        svd_count=state.k + 1,
        converged=state.converged,
    )
    return state.a, state.e, report


def objective(a, e, y, mu: float, m: MaskedMatrix, cfg: AlmConfig) -> float:
    """Diagnostic value of the functional at (a, e, y, mu).

    Both the sparse term and the residual terms are evaluated on the
    observation mask only, so values of ``e`` off the mask never contribute.
    """
    e_obs = project(e, m.mask)
    r = project(m.values - a - e_obs, m.mask)
    return (
        nuclear_norm(a)
        + cfg.lam * float(np.sum(np.abs(e_obs)))
        + inner_product(y, r)
        + 0.5 * mu * float(np.sum(r * r))
    )
