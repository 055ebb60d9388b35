"""Simulation-only check of the fast-rate condition."""

import math
from typing import Callable, Optional

import numpy as np

from oos_infer.core.exceptions import DomainError
from oos_infer.learners.base import FittedModel
from oos_infer.series.models import DesignMatrix


def fast_rate_diagnostic(
    model: FittedModel,
    truth: Callable[[np.ndarray], np.ndarray],
    test_design: DesignMatrix,
    P: Optional[int] = None
) -> float:
    """sqrt(P) * mean((m(theta_hat, x) - m(theta_0, x))^2) over the test rows.

    Args:
        model: Fitted learner
        truth: Oracle predictor x -> m(theta_0, x)
        test_design: Evaluation rows
        P: Scaling length (defaults to the number of test rows)

    Raises:
        DomainError: If the test set is empty or the oracle returns the wrong shape
    """
    if test_design.n_rows == 0:
        raise DomainError("fast-rate diagnostic needs at least one test row", field="test_design")
    fitted = model.predict_design(test_design)
    oracle = np.asarray(truth(np.asarray(test_design.rows)), dtype=float).reshape(-1)
    if oracle.shape != fitted.shape:
        raise DomainError(
            f"oracle returned {oracle.shape[0]} predictions for {fitted.shape[0]} rows", field="truth"
        )
    P = test_design.n_rows if P is None else P
    return float(math.sqrt(P) * np.mean((fitted - oracle) ** 2))
