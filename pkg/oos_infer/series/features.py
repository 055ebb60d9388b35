"""Lag, interaction and power feature construction."""

import itertools
import logging
from collections.abc import Iterable
from typing import Optional

import numpy as np

from oos_infer.core.exceptions import InsufficientDataError, ValidationError
from oos_infer.series.models import DesignMatrix, FeatureConfig, Series, SplitPlan

logger = logging.getLogger(__name__)


def build_features(
    series: Series,
    lags: int,
    include_interactions: bool = False,
    power_degrees: Iterable[int] = ()
) -> DesignMatrix:
    """Build the predictive design X_t from lagged values of the series.

    Columns are, in order: intercept, Y_{t-1}..Y_{t-L}, the products
    Y_{t-i}Y_{t-j} for i < j (when requested), and each lag raised to each
    requested power. Row t pairs target Y_t with features dated t-1..t-L, so
    T_eff = T - L rows are produced.

    Args:
        series: Input series
        lags: Number of lags L
        include_interactions: Add all distinct unordered lag pairs
        power_degrees: Subset of {2, 3, 4}

    Returns:
        DesignMatrix with intercept

    Raises:
        ValidationError: If lags < 1 or a power degree is not in {2, 3, 4}
        InsufficientDataError: If the series is shorter than lags + 2
    """
    try:
        config = FeatureConfig(
            lags=lags,
            include_interactions=include_interactions,
            power_degrees=tuple(power_degrees)
        )
    except ValueError as e:
        raise ValidationError(f"invalid feature request: {e}", field="lags") from e

    y = series.values
    T = y.size
    L = config.lags
    if T < L + 2:
        raise InsufficientDataError(
            f"series of length {T} is too short for {L} lags", required=L + 2, available=T
        )

    n = T - L
    # lagged[:, k-1] = Y_{t-k} for t = L..T-1
    lagged = np.column_stack([y[L - k:T - k] for k in range(1, L + 1)])

    blocks = [np.ones((n, 1)), lagged]
    names = ["const"] + [f"lag{k}" for k in range(1, L + 1)]

    if config.include_interactions and L > 1:
        pairs = list(itertools.combinations(range(L), 2))
        left = np.fromiter((i for i, _ in pairs), dtype=np.int64)
        right = np.fromiter((j for _, j in pairs), dtype=np.int64)
        blocks.append(lagged[:, left] * lagged[:, right])
        names.extend(f"lag{i + 1}*lag{j + 1}" for i, j in pairs)

    for degree in config.power_degrees:
        blocks.append(lagged ** degree)
        names.extend(f"lag{k}^{degree}" for k in range(1, L + 1))

    rows = np.hstack(blocks)
    logger.debug(f"Built {rows.shape[1]} features over {n} rows from '{series.name}'")
    return DesignMatrix(
        rows=rows,
        target=y[L:],
        column_names=tuple(names),
        has_intercept=True,
        target_index=np.arange(L, T)
    )


def build_from_config(series: Series, config: FeatureConfig, split: Optional[SplitPlan] = None) -> DesignMatrix:
    """Apply a :class:`FeatureConfig`, standardizing on the training rows if asked."""
    design = build_features(
        series,
        lags=config.lags,
        include_interactions=config.include_interactions,
        power_degrees=config.power_degrees
    )
    if config.standardize:
        design = standardize(design, split)
    return design


def standardize(design: DesignMatrix, split: Optional[SplitPlan] = None) -> DesignMatrix:
    """Scale columns by training-row mean and standard deviation.

    The statistics come from the estimation rows only and are applied to every
    row. The intercept and zero-variance columns are left untouched.

    Args:
        design: Design to scale
        split: Split selecting the estimation rows (all rows when None)

    Returns:
        New standardized DesignMatrix
    """
    train = design.rows[design.train_mask(split)]
    mean = train.mean(axis=0)
    sd = train.std(axis=0)

    constant = sd <= 0
    if design.has_intercept:
        constant[0] = True
    mean = np.where(constant, 0.0, mean)
    sd = np.where(constant, 1.0, sd)

    return DesignMatrix(
        rows=(design.rows - mean) / sd,
        target=design.target,
        column_names=design.column_names,
        has_intercept=design.has_intercept,
        target_index=design.target_index
    )
