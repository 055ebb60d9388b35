"""Self-normalized out-of-sample test of the martingale difference hypothesis."""

import logging
import math
from typing import Any, Optional, Union

import numpy as np
from scipy.stats import norm

from oos_infer.core.exceptions import DegenerateEstimatorError, DomainError, InsufficientDataError
from oos_infer.learners.base import FittedModel
from oos_infer.learners.ols import fit_ols
from oos_infer.learners.ridge import BlockedCvConfig, fit_ridge
from oos_infer.mdh.report import MdhMethod, MdhTestReport, clip_p_value, config_hash
from oos_infer.series.features import build_from_config
from oos_infer.series.models import FeatureConfig, Series, SplitPlan

logger = logging.getLogger(__name__)

MIN_RECOMMENDED_P = 30
ZERO_COEFFICIENT = 1e-12


def self_normalized_statistic(g: Any) -> float:
    """t = sqrt(P) mean(g) / sqrt(mean(g^2)).

    Raises:
        DomainError: If ``g`` is empty
        DegenerateEstimatorError: If every g_t is zero
    """
    values = np.asarray(g, dtype=float).ravel()
    if values.size == 0:
        raise DomainError("self-normalized statistic needs a non-empty sequence", field="g")
    second_moment = float(np.mean(values ** 2))
    if not second_moment > 0.0:
        raise DegenerateEstimatorError(
            "the products Y_t * prediction_t are all zero; the statistic is undefined"
        )
    return math.sqrt(values.size) * float(np.mean(values)) / math.sqrt(second_moment)


def benchmark_features(features: FeatureConfig, method: MdhMethod) -> FeatureConfig:
    """Feature set actually fitted by ``method``.

    The OLS benchmark keeps the lags only so that it stays low-dimensional.
    Ridge always works on columns standardized with training-row moments, so
    its single penalty shrinks lags, products and powers on a common scale.
    """
    if method is MdhMethod.OLS:
        return features.model_copy(update={"include_interactions": False, "power_degrees": ()})
    return features.model_copy(update={"standardize": True})


def _fit(method: MdhMethod, design, split: SplitPlan, cv: BlockedCvConfig) -> FittedModel:
    if method is MdhMethod.OLS:
        return fit_ols(design, split)
    if method is MdhMethod.RIDGE:
        return fit_ridge(design, split, cv=cv)
    raise DomainError(f"mdh_test supports ols and ridge, not {method.value}", field="learner")


def mdh_test(
    series: Series,
    split: SplitPlan,
    features: Optional[FeatureConfig] = None,
    learner: Union[MdhMethod, str] = MdhMethod.RIDGE,
    cv: Optional[BlockedCvConfig] = None,
    alpha: float = 0.05,
    seed: Optional[int] = None
) -> MdhTestReport:
    """Test E[Y_t | past] = 0 with a predictor fitted on the first R observations.

    For the P targets after R, g_t = Y_t * m(theta_R, X_t), and the test
    rejects when t = sqrt(P) mean(g) / sqrt(mean(g^2)) exceeds the upper
    normal quantile. Only training rows (targets before R) are used to fit.

    Args:
        series: Observed increments
        split: Partition of the series into R estimation and P test observations
        features: Lag/interaction/power configuration (30 lags with all terms by default)
        learner: ``ols`` or ``ridge`` (blocked cross-validation)
        cv: Cross-validation settings for ridge
        alpha: Test level
        seed: Replication seed, recorded only

    Returns:
        MdhTestReport with a one-sided p-value

    Raises:
        DegenerateEstimatorError: If the fitted coefficients are all zero
        InsufficientDataError: If the test segment is too short
    """
    method = MdhMethod(learner)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}", field="alpha")
    if split.T != len(series):
        raise DomainError(f"split covers {split.T} observations, series has {len(series)}", field="split")
    features = benchmark_features(features or FeatureConfig(), method)
    cv = cv or BlockedCvConfig()

    design = build_from_config(series, features, split)
    test = design.test(split)
    P = test.n_rows
    if P < 2:
        raise InsufficientDataError("MDH test needs at least two test observations", required=2, available=P)
    if P < MIN_RECOMMENDED_P:
        logger.warning(f"MDH test on only {P} test observations; normal approximation is rough")

    model = _fit(method, design, split, cv)
    if np.all(np.abs(model.theta) < ZERO_COEFFICIENT):
        raise DegenerateEstimatorError(
            "fitted coefficients are all zero, so the statistic is undefined; use ridge instead of a sparse learner"
        )

    g = test.target * model.predict_design(test)
    t_stat = self_normalized_statistic(g)
    p_value = clip_p_value(float(norm.sf(t_stat)))
    critical = float(norm.ppf(1.0 - alpha))

    logger.debug(f"MDH {method.value}: t={t_stat:.4f}, p={p_value:.4g}, P={P}")
    return MdhTestReport(
        method=method,
        statistic="t_hat",
        t_stat=t_stat,
        p_value=p_value,
        n_oos=P,
        learner_kind=model.learner_kind,
        feature_dim=design.n_columns,
        alpha=alpha,
        reject=t_stat > critical,
        lambda_used=model.lambda_used,
        seed=seed,
        config_hash=config_hash({
            "method": method.value,
            "features": features.model_dump(mode="json"),
            "cv": cv.model_dump(mode="json") if method is MdhMethod.RIDGE else None,
            "R": split.R,
            "P": split.P,
            "alpha": alpha,
        })
    )
