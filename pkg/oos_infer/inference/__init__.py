"""Out-of-sample risk, estimation risk and HAC inference."""

from oos_infer.inference.risk import (
    OosRiskReport,
    confidence_interval,
    covers,
    delta_and_er,
    oos_losses,
    oos_risk_report,
    predictive_risk,
    stylized_er_moments,
)
from oos_infer.inference.variance import auto_bandwidth, long_run_variance

__all__ = [
    "OosRiskReport",
    "auto_bandwidth",
    "confidence_interval",
    "covers",
    "delta_and_er",
    "long_run_variance",
    "oos_losses",
    "oos_risk_report",
    "predictive_risk",
    "stylized_er_moments",
]
