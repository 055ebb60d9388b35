"""Out-of-sample risk, its decomposition and normal confidence intervals."""

import logging
import math
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.stats import norm

from oos_infer.core.exceptions import DomainError
from oos_infer.inference.variance import Bandwidth, long_run_variance
from oos_infer.learners.base import FittedModel
from oos_infer.losses.catalog import LossSpec, loss_value
from oos_infer.series.models import DesignMatrix

logger = logging.getLogger(__name__)


class OosRiskReport(BaseModel):
    """Empirical out-of-sample risk with its interval, and Delta/ER when truth is known."""

    model_config = ConfigDict(frozen=True)

    empirical_risk: float
    delta: Optional[float] = None
    er: Optional[float] = None
    true_risk: Optional[float] = None
    omega_hat: float = Field(ge=0)
    alpha: float = Field(gt=0, lt=1)
    ci: tuple[float, float]
    n_oos: int = Field(ge=1)

    @model_validator(mode="after")
    def check_symmetric(self) -> "OosRiskReport":
        lo, hi = self.ci
        if not lo <= self.empirical_risk <= hi:
            raise ValueError("confidence interval must contain the empirical risk")
        return self

    @property
    def covered(self) -> Optional[bool]:
        """Whether the interval contains the true risk (None without truth)."""
        if self.true_risk is None:
            return None
        return covers(self.ci, self.true_risk)


def _check_test_set(test_design: DesignMatrix) -> None:
    if test_design.n_rows == 0:
        raise DomainError("out-of-sample evaluation needs a non-empty test set", field="test_design")


def oos_losses(model: FittedModel, loss: LossSpec, test_design: DesignMatrix) -> np.ndarray:
    """The sequence f_t(theta_R) = l(Y_t, m(theta_R, X_t)) over the test rows.

    Raises:
        DomainError: If the test set is empty
    """
    _check_test_set(test_design)
    predictions = model.predict_design(test_design)
    return np.asarray(loss_value(loss, test_design.target, predictions), dtype=float).reshape(-1)


def confidence_interval(
    empirical_risk: float,
    omega_hat: float,
    n_oos: int,
    alpha: float = 0.05
) -> tuple[float, float]:
    """risk +/- z_{1-alpha/2} sqrt(omega / P).

    Raises:
        DomainError: If alpha is outside (0, 1), omega is negative or P < 1
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}", field="alpha")
    if omega_hat < 0:
        raise DomainError(f"variance must be non-negative, got {omega_hat}", field="omega_hat")
    if n_oos < 1:
        raise DomainError(f"P must be positive, got {n_oos}", field="n_oos")
    if omega_hat == 0.0:
        logger.warning("Zero long-run variance; confidence interval has zero width")
    half = float(norm.ppf(1.0 - alpha / 2.0)) * math.sqrt(omega_hat / n_oos)
    return (empirical_risk - half, empirical_risk + half)


def covers(ci: tuple[float, float], true_risk: float) -> bool:
    lo, hi = ci
    return bool(lo <= true_risk <= hi)


def oos_risk_report(
    model: FittedModel,
    loss: LossSpec,
    test_design: DesignMatrix,
    alpha: float = 0.05,
    bandwidth: Bandwidth = "auto"
) -> OosRiskReport:
    """Empirical risk, HAC variance and interval for a fitted model; no truth needed."""
    losses = oos_losses(model, loss, test_design)
    risk = float(losses.mean())
    omega = long_run_variance(losses, bandwidth)
    return OosRiskReport(
        empirical_risk=risk,
        omega_hat=omega,
        alpha=alpha,
        ci=confidence_interval(risk, omega, losses.size, alpha),
        n_oos=losses.size
    )


def _true_predictions(test_design: DesignMatrix, true_theta: Any) -> np.ndarray:
    theta_0 = np.asarray(true_theta, dtype=float).ravel()
    if theta_0.size != test_design.n_columns:
        raise DomainError(
            f"true parameter has {theta_0.size} entries, design has {test_design.n_columns} columns",
            field="true_theta"
        )
    return np.asarray(test_design.rows) @ theta_0


def delta_and_er(
    model: FittedModel,
    loss: LossSpec,
    test_design: DesignMatrix,
    true_theta: Any,
    true_risk: float,
    alpha: float = 0.05,
    bandwidth: Bandwidth = "auto"
) -> OosRiskReport:
    """Simulation report with Delta and the estimation-risk term.

    Delta = sqrt(P) (mean f(theta_R) - true_risk) and
    ER = sqrt(P) mean(f(theta_R) - f(theta_0)), so that
    Delta = sqrt(P) (mean f(theta_0) - true_risk) + ER.

    Args:
        model: Model fitted on the estimation rows
        loss: Evaluation loss
        test_design: The P rows after R
        true_theta: theta_0 of a linear data-generating process
        true_risk: E[f_t(theta_0)]
        alpha: Interval level
        bandwidth: HAC bandwidth

    Raises:
        DomainError: On an empty test set or a theta_0 of the wrong length
    """
    losses = oos_losses(model, loss, test_design)
    oracle = np.asarray(loss_value(loss, test_design.target, _true_predictions(test_design, true_theta)))
    P = losses.size
    root_p = math.sqrt(P)
    risk = float(losses.mean())
    omega = long_run_variance(losses, bandwidth)
    return OosRiskReport(
        empirical_risk=risk,
        delta=root_p * (risk - true_risk),
        er=root_p * float(np.mean(losses - oracle)),
        true_risk=float(true_risk),
        omega_hat=omega,
        alpha=alpha,
        ci=confidence_interval(risk, omega, P, alpha),
        n_oos=P
    )


def predictive_risk(model: FittedModel, test_design: DesignMatrix, true_theta: Any) -> float:
    """r^2 = mean((x'(theta_R - theta_0))^2) over the test rows."""
    _check_test_set(test_design)
    gap = model.predict_design(test_design) - _true_predictions(test_design, true_theta)
    return float(np.mean(gap ** 2))


def stylized_er_moments(r2: float, n_oos: int, sigma2: float = 1.0) -> tuple[float, float]:
    """Conditional mean and variance of ER for squared error with Gaussian noise.

    Given r^2, ER = sqrt(P) r^2 - 2 sqrt(P) mean(eps_t x_t'(theta_R - theta_0)),
    so its mean is sqrt(P) r^2 and its variance 4 sigma^2 r^2.
    """
    if r2 < 0 or sigma2 < 0 or n_oos < 1:
        raise DomainError("stylized moments need r2 >= 0, sigma2 >= 0 and P >= 1", field="r2")
    return (math.sqrt(n_oos) * r2, 4.0 * sigma2 * r2)
