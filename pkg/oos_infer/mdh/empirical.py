"""Exchange-rate style table: one row per (pair, method, pi)."""

import logging
from typing import Iterable, Optional

import pandas as pd

from oos_infer.learners.ridge import BlockedCvConfig
from oos_infer.mdh.portmanteau import auto_portmanteau
from oos_infer.mdh.report import MdhMethod, MdhTestReport
from oos_infer.mdh.selfnormalized import mdh_test
from oos_infer.series.models import FeatureConfig, Series
from oos_infer.series.splitting import split

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ["pair", "method", "pi", "R", "P", "t_stat", "p_value", "reject", "selected_lag", "feature_dim"]


def run_test(
    series: Series,
    method: MdhMethod,
    pi: float,
    features: Optional[FeatureConfig] = None,
    cv: Optional[BlockedCvConfig] = None,
    alpha: float = 0.05,
    seed: Optional[int] = None
) -> MdhTestReport:
    """Apply one method at one split; the portmanteau sees only the test segment."""
    plan = split(series, pi=pi)
    if method is MdhMethod.AP:
        return auto_portmanteau(series.values[plan.R:], alpha=alpha, seed=seed)
    return mdh_test(series, plan, features=features, learner=method, cv=cv, alpha=alpha, seed=seed)


def mdh_table(
    pairs: dict[str, Series],
    pis: Iterable[float],
    methods: Iterable[MdhMethod],
    features: Optional[FeatureConfig] = None,
    cv: Optional[BlockedCvConfig] = None,
    alpha: float = 0.05
) -> pd.DataFrame:
    """p-values for every pair, method and split ratio."""
    pis = list(pis)
    methods = [MdhMethod(m) for m in methods]
    rows = []
    for pair, series in pairs.items():
        for method in methods:
            for pi in pis:
                report = run_test(series, method, pi, features=features, cv=cv, alpha=alpha)
                plan = split(series, pi=pi)
                rows.append({**report.to_row(), "pair": pair, "pi": pi, "R": plan.R, "P": plan.P})
                logger.info(f"{pair} {method.value} pi={pi}: p={report.p_value:.4g}")
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)
