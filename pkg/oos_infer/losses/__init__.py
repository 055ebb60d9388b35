"""Prediction losses, their scores and zero-mean-score diagnostics."""

from oos_infer.losses.catalog import (
    LossKind,
    LossSpec,
    logistic,
    loss_gradient,
    loss_value,
    psi,
    residual,
    score,
    score_scale,
)
from oos_infer.losses.diagnostics import ScoreDiagnosticReport, zero_mean_score_diagnostic

__all__ = [
    "LossKind",
    "LossSpec",
    "ScoreDiagnosticReport",
    "logistic",
    "loss_gradient",
    "loss_value",
    "psi",
    "residual",
    "score",
    "score_scale",
    "zero_mean_score_diagnostic",
]
