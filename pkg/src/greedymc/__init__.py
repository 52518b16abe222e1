"""Robust low-rank matrix completion with greedy observation pruning.

The package recovers a low-rank matrix from a subset of its entries when
some of the observed values are corrupted.  The convex core (:mod:`~greedymc.alm`)
minimizes nuclear norm plus a weighted entrywise l1 penalty under a growing
augmented-Lagrangian penalty; the greedy loop (:mod:`~greedymc.sgmca`)
repeatedly re-solves and expels observations whose residuals exceed a
geometrically decaying threshold.  :mod:`~greedymc.synthgen` builds seeded
synthetic instances and :mod:`~greedymc.benchlab` maps phase-transition
curves over them.
"""

from .alm import AlmConfig, AlmReport, AlmState
from .benchlab import (
    CurvePoint,
    CurveTable,
    SweepSpec,
    TrialResult,
    TrialSpec,
    default_lambda,
    emit,
    phase_point,
    run_trial,
    sweep,
)
from .errors import ArgumentError, NumericError
from .masking import MaskedMatrix, ObservationMask, project
from .numkit import (
    SvdResult,
    elementwise_norm,
    hamming_weight,
    inner_product,
    nuclear_norm,
    operator_norms,
    shrink,
    svd,
)
from .sgmca import GreedyConfig, GreedyResult, GreedyState, GreedyStep
from .synthgen import Instance, InstanceSpec, generate, read_instance, write_instance

__version__ = "0.1.0"

__all__ = [
    "AlmConfig", "AlmReport", "AlmState",
    "ArgumentError", "NumericError",
    "CurvePoint", "CurveTable", "SweepSpec", "TrialResult", "TrialSpec",
    "GreedyConfig", "GreedyResult", "GreedyState", "GreedyStep",
    "Instance", "InstanceSpec",
    "MaskedMatrix", "ObservationMask",
    "SvdResult",
    "default_lambda", "elementwise_norm", "emit", "generate", "hamming_weight",
    "inner_product", "nuclear_norm", "operator_norms", "phase_point", "project",
    "read_instance", "run_trial", "shrink", "svd", "sweep", "write_instance",
]
