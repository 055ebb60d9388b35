"""Simulation processes and Monte Carlo drivers."""

from oos_infer.lab.dgp import DGP_CODES, DgpKind, DgpSpec, SimDraw, generate, logistic_index, sparsity_index
from oos_infer.lab.seeding import replication_seed
from oos_infer.lab.studies import (
    McConfig,
    StudyResult,
    run_coverage_study,
    run_er_histogram,
    run_power_study,
    run_score_diagnostics,
)

__all__ = [
    "DGP_CODES",
    "DgpKind",
    "DgpSpec",
    "McConfig",
    "SimDraw",
    "StudyResult",
    "generate",
    "logistic_index",
    "replication_seed",
    "run_coverage_study",
    "run_er_histogram",
    "run_power_study",
    "run_score_diagnostics",
    "sparsity_index",
]
