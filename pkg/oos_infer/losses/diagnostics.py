"""Numeric check of the zero-mean-score condition."""

import logging
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from oos_infer.core.exceptions import DomainError
from oos_infer.losses.catalog import LossKind, LossSpec, psi

logger = logging.getLogger(__name__)

MIN_RECOMMENDED_SAMPLE = 30


class ScoreDiagnosticReport(BaseModel):
    """Sample mean of psi(eps_t) * xdot_t and its studentized size."""

    model_config = ConfigDict(frozen=True)

    loss: LossKind
    n: int
    mean_score_norm: float
    studentized: float
    threshold: float
    # None when the loss is not guaranteed a zero-mean score (ASMSPE).
    flagged: Optional[bool]


def zero_mean_score_diagnostic(
    spec: LossSpec,
    residuals: Any,
    score_weights: Any = None,
    threshold: float = 3.0
) -> ScoreDiagnosticReport:
    """Measure how far the empirical score mean is from zero.

    For each sample t the score vector is g_t = psi(eps_t) * xdot_t. The
    report gives ||mean(g)|| and the largest coordinate-wise studentized mean
    sqrt(n) |mean(g_j)| / sd(g_j).

    Args:
        spec: Loss whose score is checked
        residuals: Prediction errors eps_t
        score_weights: n x k matrix of xdot_t (unit weights when None)
        threshold: Flag level for the studentized magnitude

    Returns:
        ScoreDiagnosticReport

    Raises:
        DomainError: If the sample is empty or the weights do not align
    """
    eps = np.asarray(residuals, dtype=float).ravel()
    n = eps.size
    if n == 0:
        raise DomainError("zero-mean score diagnostic needs a non-empty sample", field="residuals")

    if score_weights is None:
        weights = np.ones((n, 1))
    else:
        weights = np.asarray(score_weights, dtype=float)
        if weights.ndim == 1:
            weights = weights[:, None]
        if weights.shape[0] != n:
            raise DomainError(
                f"score weights have {weights.shape[0]} rows for {n} residuals", field="score_weights"
            )

    if n < MIN_RECOMMENDED_SAMPLE:
        logger.warning(f"Score diagnostic on only {n} observations; studentized value is unreliable")

    g = np.asarray(psi(spec, eps)).reshape(-1, 1) * weights
    mean = g.mean(axis=0)
    sd = g.std(axis=0, ddof=1) if n > 1 else np.zeros_like(mean)

    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.sqrt(n) * np.abs(mean) / sd
    t = np.where(mean == 0, 0.0, t)
    studentized = float(np.max(t))

    flagged: Optional[bool] = None
    if spec.kind is not LossKind.ASMSPE:
        flagged = studentized > threshold
    if flagged:
        logger.warning(f"Zero-mean score looks violated for {spec.kind.value}: studentized={studentized:.3f}")

    return ScoreDiagnosticReport(
        loss=spec.kind,
        n=n,
        mean_score_norm=float(np.linalg.norm(mean)),
        studentized=studentized,
        threshold=threshold,
        flagged=flagged
    )
