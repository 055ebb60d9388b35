"""Automatic portmanteau test with data-driven lag choice."""

import logging
import math
from typing import Any, Literal, Optional, Union

import numpy as np
from scipy.stats import chi2

from oos_infer.core.exceptions import DegenerateVarianceError, DomainError, InsufficientDataError
from oos_infer.mdh.report import MdhMethod, MdhTestReport, clip_p_value, config_hash

logger = logging.getLogger(__name__)

MIN_SEGMENT = 50
MAX_LAG_CAP = 50
SWITCH_CONSTANT = 2.4


def default_max_lag(n: int) -> int:
    """min(floor(10 log10 n), 50), at least 1."""
    return max(1, min(int(math.floor(10.0 * math.log10(n))), MAX_LAG_CAP))


def robust_autocorrelations(x: np.ndarray, max_lag: int) -> np.ndarray:
    """rho~_j^2 = gamma_j^2 / tau_j for j = 1..max_lag.

    gamma_j and tau_j are averages over the n - j available pairs of
    u_t u_{t-j} and u_t^2 u_{t-j}^2 on the demeaned sequence u.
    """
    u = x - x.mean()
    u2 = u ** 2
    rho2 = np.empty(max_lag)
    for j in range(1, max_lag + 1):
        gamma = float(np.mean(u[j:] * u[:-j]))
        tau = float(np.mean(u2[j:] * u2[:-j]))
        if tau <= 0.0:
            raise DegenerateVarianceError(f"robust variance of the lag-{j} autocovariance is zero")
        rho2[j - 1] = gamma ** 2 / tau
    return rho2


def auto_portmanteau(
    segment: Any,
    max_lag: Union[Literal["auto"], int] = "auto",
    alpha: float = 0.05,
    seed: Optional[int] = None
) -> MdhTestReport:
    """Heteroskedasticity-robust Box-Pierce test with automatic lag selection.

    Q_p = n sum_{j<=p} rho~_j^2. The selected lag maximizes Q_p - pen(p), with
    pen(p) = p log n when max_j sqrt(n) |rho~_j| <= sqrt(2.4 log n) and 2p
    otherwise; Q at the selected lag is referred to chi-squared(1).

    Args:
        segment: Observations to test (the out-of-sample segment in studies)
        max_lag: Upper bound of the lag search, ``"auto"`` for min(floor(10 log10 n), 50)
        alpha: Test level
        seed: Replication seed, recorded only

    Raises:
        InsufficientDataError: If the segment has fewer than 50 values
        DegenerateVarianceError: If the segment is constant
    """
    x = np.asarray(segment, dtype=float).ravel()
    n = x.size
    if n < MIN_SEGMENT:
        raise InsufficientDataError(
            f"automatic portmanteau needs at least {MIN_SEGMENT} values", required=MIN_SEGMENT, available=n
        )
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}", field="alpha")
    if np.ptp(x) == 0.0:
        raise DegenerateVarianceError("segment is constant; autocorrelations are undefined")

    if max_lag == "auto":
        bound = default_max_lag(n)
    elif isinstance(max_lag, int) and not isinstance(max_lag, bool) and max_lag >= 1:
        bound = min(max_lag, n - 1)
    else:
        raise DomainError(f"max_lag must be 'auto' or a positive integer, got {max_lag!r}", field="max_lag")

    rho2 = robust_autocorrelations(x, bound)
    q = n * np.cumsum(rho2)
    lags = np.arange(1, bound + 1)
    log_n = math.log(n)
    if math.sqrt(n) * math.sqrt(float(rho2.max())) <= math.sqrt(SWITCH_CONSTANT * log_n):
        penalty = lags * log_n
    else:
        penalty = 2.0 * lags
    selected = int(np.argmax(q - penalty)) + 1
    statistic = float(q[selected - 1])
    p_value = clip_p_value(float(chi2.sf(statistic, df=1)))

    logger.debug(f"AP: lag {selected} of {bound}, Q={statistic:.4f}, p={p_value:.4g}")
    return MdhTestReport(
        method=MdhMethod.AP,
        statistic="Q",
        t_stat=statistic,
        p_value=p_value,
        n_oos=n,
        alpha=alpha,
        reject=p_value < alpha,
        selected_lag=selected,
        seed=seed,
        config_hash=config_hash({"method": "ap", "max_lag": bound, "n": n, "alpha": alpha})
    )
