"""Ordinary least squares for the low-dimensional regime."""

import logging
from typing import Optional

import numpy as np

from oos_infer.core.exceptions import SingularDesignError
from oos_infer.learners.base import FitDiagnostics, FittedModel, LearnerKind, training_arrays
from oos_infer.series.models import DesignMatrix, SplitPlan

logger = logging.getLogger(__name__)

MAX_CONDITION_NUMBER = 1e12


def fit_ols(design: DesignMatrix, split: Optional[SplitPlan] = None) -> FittedModel:
    """Solve the normal equations on the estimation rows.

    Args:
        design: Regressors and target
        split: Selects estimation rows (all rows when None)

    Returns:
        FittedModel with learner_kind ``ols``

    Raises:
        SingularDesignError: If R <= p or the Gram matrix condition number exceeds 1e12
    """
    X, y = training_arrays(design, split)
    n, p = X.shape
    if n <= p:
        raise SingularDesignError(
            f"OLS needs more estimation rows ({n}) than regressors ({p}); use ridge instead"
        )

    gram = X.T @ X / n
    condition = float(np.linalg.cond(gram))
    if not np.isfinite(condition) or condition > MAX_CONDITION_NUMBER:
        raise SingularDesignError(
            f"Gram matrix is singular (condition number {condition:.3g}); use ridge instead",
            condition_number=condition
        )

    theta = np.linalg.solve(gram, X.T @ y / n)
    resid = y - X @ theta
    objective = float(np.mean(resid ** 2))
    logger.debug(f"OLS fit on {n} rows, {p} columns, condition {condition:.3g}")

    return FittedModel(
        theta=theta,
        learner_kind=LearnerKind.OLS,
        lambda_used=0.0,
        diagnostics=FitDiagnostics(
            iterations=1,
            final_objective=objective,
            converged=True,
            objective_path=(objective,),
            extra={"condition_number": condition}
        ),
        column_names=design.column_names
    )
