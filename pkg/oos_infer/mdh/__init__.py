"""Tests of the martingale difference hypothesis."""

from oos_infer.mdh.empirical import mdh_table, run_test
from oos_infer.mdh.portmanteau import auto_portmanteau, default_max_lag, robust_autocorrelations
from oos_infer.mdh.report import MdhMethod, MdhTestReport, config_hash
from oos_infer.mdh.selfnormalized import benchmark_features, mdh_test, self_normalized_statistic

__all__ = [
    "MdhMethod",
    "MdhTestReport",
    "auto_portmanteau",
    "benchmark_features",
    "config_hash",
    "default_max_lag",
    "mdh_table",
    "mdh_test",
    "robust_autocorrelations",
    "run_test",
    "self_normalized_statistic",
]
