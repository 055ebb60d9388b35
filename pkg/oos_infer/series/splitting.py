"""Fixed-scheme sample splitting."""

import logging
import math
from typing import Optional, Union

from oos_infer.core.exceptions import InvalidSplitError
from oos_infer.series.models import Series, SplitPlan

logger = logging.getLogger(__name__)

MIN_OUT_OF_SAMPLE = 2


def split(
    series: Union[Series, int],
    pi: Optional[float] = None,
    R: Optional[int] = None
) -> SplitPlan:
    """Partition a sample of size T into R estimation and P evaluation points.

    Exactly one of ``pi`` and ``R`` must be given. With ``pi``,
    R = round(T / (1 + pi)) with ties rounded down.

    Args:
        series: The series, or its length T
        pi: Out-of-sample to in-sample ratio P/R
        R: In-sample size

    Returns:
        SplitPlan with R + P = T

    Raises:
        InvalidSplitError: If the arguments do not yield R >= 1 and P >= 2
    """
    T = series if isinstance(series, int) else len(series)

    if (pi is None) == (R is None):
        raise InvalidSplitError("exactly one of pi and R must be given", field="pi")

    if pi is not None:
        if not math.isfinite(pi) or pi <= 0:
            raise InvalidSplitError(f"pi must be positive and finite, got {pi}", field="pi")
        # ceil(x - 0.5) rounds half down
        R = math.ceil(T / (1.0 + pi) - 0.5)
        field = "pi"
    else:
        field = "R"

    assert R is not None
    if R < 1 or R >= T:
        raise InvalidSplitError(f"R={R} leaves no estimation or evaluation sample for T={T}", field=field)

    P = T - R
    if P < MIN_OUT_OF_SAMPLE:
        raise InvalidSplitError(f"out-of-sample size P={P} is below {MIN_OUT_OF_SAMPLE}", field=field)

    plan = SplitPlan(R=R, P=P, pi=P / R)
    logger.debug(f"Split T={T} into R={plan.R}, P={plan.P} (pi={plan.pi:.4f})")
    return plan
