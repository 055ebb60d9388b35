"""Long-run variance of a loss sequence by Bartlett-kernel HAC."""

import logging
import math
from typing import Any, Literal, Union

import numpy as np

from oos_infer.core.exceptions import DomainError, InsufficientDataError

logger = logging.getLogger(__name__)

Bandwidth = Union[Literal["auto"], int]

MIN_RECOMMENDED_LENGTH = 8
POSITIVITY_FLOOR = 1e-12
# Gamma(0) relative to the raw mean square below which a sequence is constant
CONSTANT_TOLERANCE = 1e-24


def auto_bandwidth(n: int) -> int:
    """floor(4 (n / 100)^(2/9))."""
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def autocovariances(a: np.ndarray, max_lag: int) -> np.ndarray:
    """Gamma(j) = (1/n) sum_{t>j} a_t a_{t-j} for j = 0..max_lag; ``a`` already demeaned."""
    n = a.size
    gammas = np.empty(max_lag + 1)
    gammas[0] = float(a @ a) / n
    for j in range(1, max_lag + 1):
        gammas[j] = float(a[j:] @ a[:-j]) / n
    return gammas


def resolve_bandwidth(bandwidth: Bandwidth, n: int) -> int:
    if bandwidth == "auto":
        return auto_bandwidth(n)
    if isinstance(bandwidth, bool) or not isinstance(bandwidth, (int, np.integer)):
        raise DomainError(f"bandwidth must be 'auto' or an integer, got {bandwidth!r}", field="bandwidth")
    if bandwidth < 0:
        raise DomainError(f"bandwidth must be non-negative, got {bandwidth}", field="bandwidth")
    return int(bandwidth)


def long_run_variance(losses: Any, bandwidth: Bandwidth = "auto") -> float:
    """Bartlett-kernel estimate of the long-run variance of ``losses``.

    Omega = Gamma(0) + 2 sum_{j=1..L} (1 - j/(L+1)) Gamma(j) on the demeaned
    sequence. The bandwidth is capped at n - 1 and the result is floored at
    Gamma(0) * 1e-12 so it stays positive whenever the sequence varies.

    Args:
        losses: Loss sequence a_t
        bandwidth: Lag truncation L, or ``"auto"`` for floor(4 (P/100)^(2/9))

    Returns:
        Non-negative variance estimate; 0 for a sequence that is constant up to
        rounding (Gamma(0) at most 1e-24 times the raw mean square)

    Raises:
        InsufficientDataError: If fewer than two values are supplied
        DomainError: For a negative or malformed bandwidth
    """
    a = np.asarray(losses, dtype=float).ravel()
    n = a.size
    if n < 2:
        raise InsufficientDataError("long-run variance needs at least two values", required=2, available=n)
    if n < MIN_RECOMMENDED_LENGTH:
        logger.warning(f"Long-run variance on only {n} values is unreliable")

    lag = min(resolve_bandwidth(bandwidth, n), n - 1)
    scale = float(np.mean(a ** 2))
    a = a - a.mean()
    gammas = autocovariances(a, lag)
    if gammas[0] <= CONSTANT_TOLERANCE * scale:
        logger.warning("Loss sequence is constant; long-run variance is 0")
        return 0.0

    weights = 1.0 - np.arange(1, lag + 1) / (lag + 1.0)
    omega = gammas[0] + 2.0 * float(weights @ gammas[1:])
    return float(max(omega, gammas[0] * POSITIVITY_FLOOR))
