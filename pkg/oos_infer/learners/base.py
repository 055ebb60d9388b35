"""Fitted-model record shared by all learners."""

from enum import Enum
from typing import Any, Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from oos_infer.core.arrays import readonly_array
from oos_infer.core.exceptions import DomainError
from oos_infer.learners.network import DnnArchitecture, forward
from oos_infer.series.models import DesignMatrix, SplitPlan

# Recorded objective paths may rise by at most this much and still count as monotone.
MONOTONE_SLACK = 1e-12


class LearnerKind(str, Enum):
    """Available in-sample estimators."""

    OLS = "ols"
    RIDGE = "ridge"
    LASSO = "lasso"
    DNN = "dnn"


class FitDiagnostics(BaseModel):
    """Optimizer bookkeeping for a fit."""

    model_config = ConfigDict(frozen=True)

    iterations: int = 0
    final_objective: float = float("nan")
    converged: bool = True
    objective_path: tuple[float, ...] = ()
    kkt_satisfied: Optional[bool] = None
    extra: dict[str, Any] = Field(default_factory=dict)


class FittedModel(BaseModel):
    """Estimated parameters theta_R and the prediction map they induce."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    theta: np.ndarray
    learner_kind: LearnerKind
    lambda_used: float = 0.0
    diagnostics: FitDiagnostics = Field(default_factory=FitDiagnostics)
    architecture: Optional[DnnArchitecture] = None
    column_names: tuple[str, ...] = ()

    @field_validator("theta", mode="before")
    @classmethod
    def validate_theta(cls, v: Any) -> np.ndarray:
        return readonly_array(v, ndim=1, name="theta")

    def predict(self, rows: Any) -> np.ndarray:
        """m(theta, x) for each row of ``rows`` (n x p array)."""
        x = np.asarray(rows, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
        if self.architecture is not None:
            return forward(self.architecture, self.theta, x)
        if x.shape[1] != self.theta.size:
            raise DomainError(
                f"rows have {x.shape[1]} columns, model has {self.theta.size} parameters", field="rows"
            )
        return x @ self.theta

    def predict_design(self, design: DesignMatrix) -> np.ndarray:
        return self.predict(design.rows)


def training_arrays(design: DesignMatrix, split: Optional[SplitPlan]) -> tuple[np.ndarray, np.ndarray]:
    """Rows and targets of the estimation sample.

    Raises:
        DomainError: If the estimation sample is empty
    """
    mask = design.train_mask(split)
    if not np.any(mask):
        raise DomainError("design has no estimation rows for this split", field="design")
    return np.asarray(design.rows[mask]), np.asarray(design.target[mask])


def penalty_mask(design: DesignMatrix) -> np.ndarray:
    """True for penalized coordinates; the intercept column is exempt."""
    mask = np.ones(design.n_columns, dtype=bool)
    if design.has_intercept:
        mask[0] = False
    return mask


def is_monotone(path: tuple[float, ...]) -> bool:
    """Whether an objective path never increases beyond the slack."""
    if len(path) < 2:
        return True
    steps = np.diff(np.asarray(path))
    scale = np.maximum(1.0, np.abs(np.asarray(path[:-1])))
    return bool(np.all(steps <= MONOTONE_SLACK * scale))


def linear_oracle(theta_0: Any) -> Callable[[np.ndarray], np.ndarray]:
    """Truth map x -> x' theta_0 for simulation diagnostics."""
    theta = np.asarray(theta_0, dtype=float)

    def oracle(rows: np.ndarray) -> np.ndarray:
        return np.asarray(rows, dtype=float) @ theta

    return oracle
