"""Ridge regression with blocked time-series cross-validation."""

import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from oos_infer.core.exceptions import DomainError, InsufficientDataError
from oos_infer.learners.base import FitDiagnostics, FittedModel, LearnerKind, training_arrays
from oos_infer.series.models import DesignMatrix, SplitPlan

logger = logging.getLogger(__name__)


def default_lambda_grid() -> tuple[float, ...]:
    return tuple(float(v) for v in np.logspace(-4, 2, 20))


class BlockedCvConfig(BaseModel):
    """Blocked cross-validation: k contiguous blocks, each split chronologically."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(default=2, ge=1, description="Number of contiguous blocks")
    train_fraction: float = Field(default=0.8, gt=0, lt=1, description="Within-block training share")
    grid: tuple[float, ...] = Field(default_factory=default_lambda_grid)

    @field_validator("grid")
    @classmethod
    def validate_grid(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v:
            raise ValueError("lambda grid is empty")
        if any(lam < 0 for lam in v):
            raise ValueError("lambda grid values must be non-negative")
        return tuple(sorted(v))


class _RidgeSolver:
    """One SVD of the (centered) design, reused across penalties.

    With an intercept in column 0 the remaining columns and the target are
    centered, which leaves the intercept unpenalized.
    """

    def __init__(self, X: np.ndarray, y: np.ndarray, has_intercept: bool) -> None:
        self.n, self.p = X.shape
        self.has_intercept = has_intercept
        if has_intercept:
            self.x_mean = X[:, 1:].mean(axis=0)
            self.y_mean = float(y.mean())
            Xc = X[:, 1:] - self.x_mean
            yc = y - self.y_mean
        else:
            Xc, yc = X, y
        if Xc.shape[1] == 0:
            U, s, Vt = np.zeros((self.n, 0)), np.zeros(0), np.zeros((0, 0))
        else:
            U, s, Vt = np.linalg.svd(Xc, full_matrices=False)
        self.s = s
        self.Vt = Vt
        self.uty = U.T @ yc
        self.tol = s.max() * max(Xc.shape) * np.finfo(float).eps if s.size else 0.0

    def solve(self, lam: float) -> np.ndarray:
        denom = self.s ** 2 + self.n * lam
        keep = (self.s > self.tol) | (lam > 0)
        factor = np.where(keep, self.s / np.where(denom > 0, denom, 1.0), 0.0)
        coef = self.Vt.T @ (factor * self.uty)
        if not self.has_intercept:
            return coef
        intercept = self.y_mean - float(self.x_mean @ coef)
        return np.concatenate([[intercept], coef])


def _blocked_cv(X: np.ndarray, y: np.ndarray, has_intercept: bool, cv: BlockedCvConfig) -> tuple[float, dict[float, float]]:
    n = X.shape[0]
    blocks = np.array_split(np.arange(n), cv.k)
    scores = np.zeros(len(cv.grid))
    used = 0
    for block in blocks:
        cut = int(np.floor(cv.train_fraction * block.size))
        if cut < 2 or block.size - cut < 1:
            continue
        train, test = block[:cut], block[cut:]
        solver = _RidgeSolver(X[train], y[train], has_intercept)
        for i, lam in enumerate(cv.grid):
            resid = y[test] - X[test] @ solver.solve(lam)
            scores[i] += float(np.mean(resid ** 2))
        used += 1
    if used == 0:
        raise InsufficientDataError(
            f"{n} estimation rows are too few for {cv.k}-block cross-validation",
            required=3 * cv.k,
            available=n
        )
    scores /= used
    best = int(np.argmin(scores))
    return cv.grid[best], {lam: float(score) for lam, score in zip(cv.grid, scores)}


def fit_ridge(
    design: DesignMatrix,
    split: Optional[SplitPlan] = None,
    lam: Optional[float] = None,
    cv: Optional[BlockedCvConfig] = None
) -> FittedModel:
    """Minimize mean((y - X theta)^2) + lambda ||theta||^2 on the estimation rows.

    The solution satisfies (X'X / R + lambda D) theta = X'y / R, where D is the
    identity with the intercept entry zeroed. When ``cv`` is given, lambda is
    chosen on its grid by blocked cross-validation.

    Args:
        design: Regressors and target
        split: Selects estimation rows (all rows when None)
        lam: Fixed penalty
        cv: Blocked cross-validation settings (used when ``lam`` is None)

    Returns:
        FittedModel with learner_kind ``ridge``

    Raises:
        DomainError: If lambda is negative or neither lam nor cv is given
    """
    if lam is None and cv is None:
        raise DomainError("ridge needs either a penalty or a cross-validation config", field="lambda")
    if lam is not None and lam < 0:
        raise DomainError(f"ridge penalty must be non-negative, got {lam}", field="lambda")

    X, y = training_arrays(design, split)
    extra: dict = {}
    if lam is None:
        assert cv is not None
        lam, scores = _blocked_cv(X, y, design.has_intercept, cv)
        extra = {"cv_k": cv.k, "cv_scores": scores}
        logger.debug(f"Blocked CV ({cv.k} blocks) selected lambda={lam:.3g}")

    theta = _RidgeSolver(X, y, design.has_intercept).solve(lam)
    penalized = theta[1:] if design.has_intercept else theta
    objective = float(np.mean((y - X @ theta) ** 2) + lam * np.sum(penalized ** 2))

    return FittedModel(
        theta=theta,
        learner_kind=LearnerKind.RIDGE,
        lambda_used=float(lam),
        diagnostics=FitDiagnostics(
            iterations=1,
            final_objective=objective,
            converged=True,
            objective_path=(objective,),
            extra=extra
        ),
        column_names=design.column_names
    )
