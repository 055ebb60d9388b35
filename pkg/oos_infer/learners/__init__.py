"""In-sample estimators: OLS, Ridge, Lasso and a penalized ReLU network."""

from oos_infer.learners.base import FitDiagnostics, FittedModel, LearnerKind, linear_oracle
from oos_infer.learners.diagnostics import fast_rate_diagnostic
from oos_infer.learners.dnn import OptimizerConfig, fit_dnn
from oos_infer.learners.lasso import LambdaRule, fit_lasso, lasso_penalty, soft_threshold
from oos_infer.learners.network import (
    DnnArchitecture,
    clipped_norm,
    forward,
    network_objective_and_gradient,
)
from oos_infer.learners.ols import fit_ols
from oos_infer.learners.ridge import BlockedCvConfig, fit_ridge
from oos_infer.learners.select import DnnOptions, LearnerOptions, fit_learner

__all__ = [
    "BlockedCvConfig",
    "DnnArchitecture",
    "DnnOptions",
    "FitDiagnostics",
    "FittedModel",
    "LambdaRule",
    "LearnerKind",
    "LearnerOptions",
    "OptimizerConfig",
    "clipped_norm",
    "fast_rate_diagnostic",
    "fit_dnn",
    "fit_lasso",
    "fit_learner",
    "fit_ols",
    "fit_ridge",
    "forward",
    "lasso_penalty",
    "linear_oracle",
    "network_objective_and_gradient",
    "soft_threshold",
]
