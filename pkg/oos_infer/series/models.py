"""Series, split plan and design-matrix models."""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from oos_infer.core.arrays import readonly_array


class Series(BaseModel):
    """An ordered, strictly indexed univariate time series."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    name: str = "series"
    frequency: str = "unknown"
    metadata: dict[str, Any] = Field(default_factory=dict)

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, v: Any) -> np.ndarray:
        """Require at least two finite observations."""
        values = readonly_array(v, ndim=1, name="values")
        if values.size < 2:
            raise ValueError(f"series needs at least 2 observations, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("series values must be finite")
        return values

    def __len__(self) -> int:
        return int(self.values.size)


class SplitPlan(BaseModel):
    """Fixed-scheme partition: estimate on 1..R, evaluate on R+1..T."""

    model_config = ConfigDict(frozen=True)

    R: int = Field(ge=1, description="In-sample size")
    P: int = Field(ge=1, description="Out-of-sample size")
    pi: float = Field(gt=0, description="Ratio P/R")

    @model_validator(mode="after")
    def check_ratio(self) -> "SplitPlan":
        """pi must equal P/R exactly."""
        if self.pi != self.P / self.R:
            raise ValueError(f"pi={self.pi} does not equal P/R={self.P / self.R}")
        return self

    @property
    def T(self) -> int:
        """Total sample size."""
        return self.R + self.P


class FeatureConfig(BaseModel):
    """Serializable request for :func:`oos_infer.series.build_features`."""

    model_config = ConfigDict(frozen=True)

    lags: int = Field(default=30, ge=1)
    include_interactions: bool = True
    power_degrees: tuple[int, ...] = (2, 3, 4)
    standardize: bool = False

    @field_validator("power_degrees", mode="before")
    @classmethod
    def validate_powers(cls, v: Any) -> tuple[int, ...]:
        """Powers must come from {2, 3, 4}; stored sorted and unique."""
        degrees = tuple(sorted({int(d) for d in v}))
        bad = [d for d in degrees if d not in (2, 3, 4)]
        if bad:
            raise ValueError(f"power degrees must be in {{2,3,4}}, got {bad}")
        return degrees

    @property
    def n_columns(self) -> int:
        """Closed-form column count of the resulting design."""
        L = self.lags
        interactions = L * (L - 1) // 2 if self.include_interactions else 0
        return 1 + L + interactions + len(self.power_degrees) * L


class DesignMatrix(BaseModel):
    """Regressor rows X_t aligned with targets Y_t.

    ``target_index`` holds the time index of each row's target so that a
    :class:`SplitPlan` on the original series selects training rows
    (``target_index < R``) and test rows (``target_index >= R``).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rows: np.ndarray
    target: np.ndarray
    column_names: tuple[str, ...]
    has_intercept: bool = False
    target_index: np.ndarray

    @field_validator("rows", mode="before")
    @classmethod
    def validate_rows(cls, v: Any) -> np.ndarray:
        rows = readonly_array(v, ndim=2, name="rows")
        if not np.all(np.isfinite(rows)):
            raise ValueError("design rows contain missing or non-finite entries")
        return rows

    @field_validator("target", mode="before")
    @classmethod
    def validate_target(cls, v: Any) -> np.ndarray:
        target = readonly_array(v, ndim=1, name="target")
        if not np.all(np.isfinite(target)):
            raise ValueError("design target contains missing or non-finite entries")
        return target

    @field_validator("target_index", mode="before")
    @classmethod
    def validate_target_index(cls, v: Any) -> np.ndarray:
        index = np.array(v, dtype=np.int64, copy=True)
        if index.ndim != 1:
            raise ValueError("target_index must be 1-dimensional")
        if index.size > 1 and np.any(np.diff(index) <= 0):
            raise ValueError("target_index must be strictly increasing")
        index.setflags(write=False)
        return index

    @model_validator(mode="after")
    def check_shapes(self) -> "DesignMatrix":
        n, p = self.rows.shape
        if self.target.size != n or self.target_index.size != n:
            raise ValueError(
                f"rows ({n}), target ({self.target.size}) and target_index "
                f"({self.target_index.size}) must align"
            )
        if len(self.column_names) != p:
            raise ValueError(f"{len(self.column_names)} column names for {p} columns")
        return self

    @classmethod
    def from_arrays(
        cls,
        rows: Any,
        target: Any,
        column_names: tuple[str, ...] | None = None,
        has_intercept: bool = False
    ) -> "DesignMatrix":
        """Build a design whose rows are indexed 0..n-1.

        Args:
            rows: n x p regressor matrix
            target: length-n response
            column_names: Optional labels, default ``x0..x{p-1}``
            has_intercept: Whether column 0 is the constant 1

        Returns:
            DesignMatrix
        """
        rows = np.asarray(rows, dtype=float)
        if rows.ndim == 1:
            rows = rows[:, None]
        names = column_names or tuple(f"x{j}" for j in range(rows.shape[1]))
        return cls(
            rows=rows,
            target=target,
            column_names=names,
            has_intercept=has_intercept,
            target_index=np.arange(rows.shape[0])
        )

    @property
    def n_rows(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_columns(self) -> int:
        return int(self.rows.shape[1])

    def train_mask(self, split: SplitPlan | None) -> np.ndarray:
        """Boolean mask of estimation rows (all rows when ``split`` is None)."""
        if split is None:
            return np.ones(self.n_rows, dtype=bool)
        return self.target_index < split.R

    def test_mask(self, split: SplitPlan) -> np.ndarray:
        """Boolean mask of evaluation rows."""
        return (self.target_index >= split.R) & (self.target_index < split.T)

    def subset(self, mask: np.ndarray) -> "DesignMatrix":
        """Rows selected by ``mask`` as a new design."""
        return DesignMatrix(
            rows=self.rows[mask],
            target=self.target[mask],
            column_names=self.column_names,
            has_intercept=self.has_intercept,
            target_index=self.target_index[mask]
        )

    def train(self, split: SplitPlan | None) -> "DesignMatrix":
        return self.subset(self.train_mask(split))

    def test(self, split: SplitPlan) -> "DesignMatrix":
        return self.subset(self.test_mask(split))
