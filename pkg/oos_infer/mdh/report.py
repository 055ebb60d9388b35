"""Result record shared by the MDH tests."""

import hashlib
import json
from enum import Enum
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from oos_infer.learners.base import LearnerKind

# Keeps reported p-values strictly inside (0, 1).
P_VALUE_EPS = np.finfo(float).tiny


class MdhMethod(str, Enum):
    """Test procedures: prediction-based (ols, ridge) and the portmanteau benchmark."""

    OLS = "ols"
    RIDGE = "ridge"
    AP = "ap"


class MdhTestReport(BaseModel):
    """Outcome of one test of the martingale difference hypothesis."""

    model_config = ConfigDict(frozen=True)

    method: MdhMethod
    statistic: str = Field(description="'t_hat' for prediction tests, 'Q' for the portmanteau")
    t_stat: float
    p_value: float = Field(gt=0, lt=1)
    n_oos: int = Field(ge=1)
    learner_kind: Optional[LearnerKind] = None
    feature_dim: int = Field(default=0, ge=0)
    alpha: float = Field(default=0.05, gt=0, lt=1)
    reject: bool
    selected_lag: Optional[int] = None
    lambda_used: Optional[float] = None
    seed: Optional[int] = None
    config_hash: str = ""

    def to_row(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


def clip_p_value(p: float) -> float:
    return float(min(max(p, P_VALUE_EPS), 1.0 - np.finfo(float).eps))


def config_hash(config: dict[str, Any]) -> str:
    """Short sha256 of the canonical JSON form of a test configuration."""
    payload = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
