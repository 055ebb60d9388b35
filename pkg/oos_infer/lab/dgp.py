"""Simulation data-generating processes for the Monte Carlo studies."""

import logging
import math
from enum import Enum
from typing import Any, Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from oos_infer.core.arrays import readonly_array
from oos_infer.core.exceptions import ConfigurationError
from oos_infer.losses.catalog import logistic
from oos_infer.series.models import DesignMatrix, Series

logger = logging.getLogger(__name__)

BURN_IN = 500


class DgpKind(str, Enum):
    """Available processes; values double as CLI names."""

    DECREASING_SPARSITY = "decreasing-sparsity"
    MULTICOLLINEARITY = "multicollinearity"
    FAST_RATES = "fast-rates"
    GARCH11 = "garch11"
    AR1_GARCH = "ar1-garch"
    EXP1 = "exp1"
    NLMA = "nlma"
    AR4_EXP1 = "ar4-exp1"
    BINARY_LOGISTIC = "binary-logistic"


# Stable integer identities used in seed derivation; never renumber.
DGP_CODES = {
    DgpKind.DECREASING_SPARSITY: 1,
    DgpKind.MULTICOLLINEARITY: 2,
    DgpKind.FAST_RATES: 3,
    DgpKind.GARCH11: 4,
    DgpKind.AR1_GARCH: 5,
    DgpKind.EXP1: 6,
    DgpKind.NLMA: 7,
    DgpKind.AR4_EXP1: 8,
    DgpKind.BINARY_LOGISTIC: 9,
}

LINEAR_KINDS = frozenset({DgpKind.DECREASING_SPARSITY, DgpKind.MULTICOLLINEARITY, DgpKind.FAST_RATES})
SERIES_KINDS = frozenset({DgpKind.GARCH11, DgpKind.AR1_GARCH, DgpKind.EXP1, DgpKind.NLMA, DgpKind.AR4_EXP1})


def parse_kind(name: Any) -> DgpKind:
    """DgpKind from a CLI name; accepts underscores for hyphens.

    Raises:
        ConfigurationError: For unknown names
    """
    if isinstance(name, DgpKind):
        return name
    try:
        return DgpKind(str(name).strip().lower().replace("_", "-"))
    except ValueError as e:
        known = ", ".join(k.value for k in DgpKind)
        raise ConfigurationError(f"unknown dgp '{name}' (known: {known})", config_field="dgp") from e


class DgpSpec(BaseModel):
    """A process, its sample length and seed, plus process parameters."""

    model_config = ConfigDict(frozen=True)

    kind: DgpKind
    T: int = Field(ge=2)
    seed: int = Field(ge=0, lt=2**64)

    # Linear designs
    n_features: Optional[int] = Field(default=None, ge=1, description="p; defaults to T")
    sparsity: Optional[int] = Field(default=None, ge=1, description="Overrides the kind's sparsity rule")
    noise_sd: float = Field(default=0.1, gt=0, description="Multicollinearity perturbation sd")

    # GARCH(1,1) volatility
    omega: float = Field(default=0.1, gt=0)
    garch_alpha: float = Field(default=0.2, ge=0)
    garch_beta: float = Field(default=0.7, ge=0)
    garch_shock: Literal["innovation", "observed"] = Field(
        default="innovation",
        description="Lagged shock in the variance recursion: the iid innovation e_{t-1} or the scaled shock e_{t-1} sigma_{t-1}"
    )
    phi: float = Field(default=0.3, description="AR(1) coefficient of ar1-garch")

    # Exponential autoregression
    exp_a: float = 0.6
    exp_b: float = Field(default=0.5, ge=0)

    # Binary logistic
    logistic_dim: int = Field(default=3, ge=1)

    burn_in: int = Field(default=BURN_IN, ge=0)

    @field_validator("kind", mode="before")
    @classmethod
    def validate_kind(cls, v: Any) -> DgpKind:
        try:
            return parse_kind(v)
        except ConfigurationError as e:
            raise ValueError(e.message) from e

    @model_validator(mode="after")
    def check_stationarity(self) -> "DgpSpec":
        if self.garch_alpha + self.garch_beta >= 1.0:
            raise ValueError("GARCH parameters need alpha + beta < 1 for covariance stationarity")
        return self

    @property
    def code(self) -> int:
        return DGP_CODES[self.kind]

    @property
    def p(self) -> int:
        return self.n_features or self.T


class SimDraw(BaseModel):
    """One simulated sample with whatever truth the process knows."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: DgpSpec
    series: Optional[Series] = None
    design: Optional[DesignMatrix] = None
    theta_0: Optional[np.ndarray] = None
    true_risk: Optional[float] = None
    sparsity: Optional[int] = None

    @field_validator("theta_0", mode="before")
    @classmethod
    def validate_theta(cls, v: Any) -> Optional[np.ndarray]:
        return None if v is None else readonly_array(v, ndim=1, name="theta_0")


def sparsity_index(p: int) -> int:
    """s = ceil(sqrt(p) - 27), clamped to [1, p]."""
    return int(min(max(math.ceil(math.sqrt(p) - 27.0), 1), p))


def alternating_theta(p: int, s: int) -> np.ndarray:
    """theta_0 with s leading entries +1, -1, +1, ... and zeros after."""
    theta = np.zeros(p)
    theta[:s] = np.where(np.arange(s) % 2 == 0, 1.0, -1.0)
    return theta


def _sparsity(spec: DgpSpec) -> int:
    if spec.sparsity is not None:
        return min(spec.sparsity, spec.p)
    if spec.kind is DgpKind.DECREASING_SPARSITY:
        return sparsity_index(spec.p)
    if spec.kind is DgpKind.MULTICOLLINEARITY:
        return min(15, spec.p)
    return min(5, spec.p)


def _linear(spec: DgpSpec, rng: np.random.Generator) -> SimDraw:
    T, p = spec.T, spec.p
    s = _sparsity(spec)
    if spec.kind is DgpKind.MULTICOLLINEARITY:
        base = rng.standard_normal(T)
        X = base[:, None] + spec.noise_sd * rng.standard_normal((T, p))
        X[:, 0] = base
    else:
        X = rng.standard_normal((T, p))
    theta_0 = alternating_theta(p, s)
    y = X @ theta_0 + rng.standard_normal(T)
    design = DesignMatrix.from_arrays(X, y, column_names=tuple(f"x{j + 1}" for j in range(p)))
    return SimDraw(spec=spec, design=design, theta_0=theta_0, true_risk=1.0, sparsity=s)


def _recursion(spec: DgpSpec, rng: np.random.Generator) -> np.ndarray:
    n = spec.T + spec.burn_in
    e = rng.standard_normal(n)
    y = np.zeros(n)

    if spec.kind in (DgpKind.GARCH11, DgpKind.AR1_GARCH):
        # sigma2_t = omega + alpha * shock_{t-1}^2 + beta * sigma2_{t-1}; the shock is
        # e_{t-1} ("innovation") or e_{t-1} * sigma_{t-1} ("observed")
        phi = spec.phi if spec.kind is DgpKind.AR1_GARCH else 0.0
        observed = spec.garch_shock == "observed"
        shock_prev, sigma2_prev, y_prev = 0.0, 0.0, 0.0
        for t in range(n):
            sigma2 = spec.omega + spec.garch_alpha * shock_prev ** 2 + spec.garch_beta * sigma2_prev
            shock = e[t] * math.sqrt(sigma2)
            y[t] = phi * y_prev + shock
            shock_prev = shock if observed else e[t]
            sigma2_prev, y_prev = sigma2, y[t]
    elif spec.kind is DgpKind.EXP1:
        for t in range(1, n):
            y[t] = spec.exp_a * y[t - 1] * math.exp(-spec.exp_b * y[t - 1] ** 2) + e[t]
    elif spec.kind is DgpKind.NLMA:
        y[2:] = e[1:-1] * e[:-2] * (1.0 + e[2:] + e[:-2])
    elif spec.kind is DgpKind.AR4_EXP1:
        for t in range(n):
            lag = [y[t - k] if t - k >= 0 else 0.0 for k in (1, 2, 3, 4)]
            y[t] = (
                10.0 * math.exp(-0.5 * lag[0] ** 2)
                + 0.58 * lag[0] + 0.1 * lag[1] + 0.06 * lag[2] + 0.02 * lag[3]
                + e[t]
            )
    return y[spec.burn_in:]


def _series(spec: DgpSpec, rng: np.random.Generator) -> SimDraw:
    values = _recursion(spec, rng)
    series = Series(
        values=values,
        name=spec.kind.value,
        frequency="simulated",
        metadata={"seed": spec.seed, "burn_in": spec.burn_in}
    )
    return SimDraw(spec=spec, series=series)


def logistic_index(rows: np.ndarray) -> np.ndarray:
    """m_0(x) = sum_k sin(pi x_k), the log-odds of the binary-logistic process."""
    return np.sin(np.pi * np.asarray(rows, dtype=float)).sum(axis=1)


def _binary_logistic(spec: DgpSpec, rng: np.random.Generator) -> SimDraw:
    d = spec.logistic_dim
    n = spec.T + spec.burn_in
    shocks = rng.normal(scale=0.5, size=(n, d))
    X = np.zeros((n, d))
    prev = np.zeros(d)
    for t in range(n):
        prev = np.clip(0.5 * prev + shocks[t], -1.0, 1.0)
        X[t] = prev
    X = X[spec.burn_in:]
    prob = np.asarray(logistic(logistic_index(X)))
    y = (rng.random(spec.T) < prob).astype(float)
    design = DesignMatrix.from_arrays(X, y, column_names=tuple(f"x{k + 1}" for k in range(d)))
    return SimDraw(spec=spec, design=design)


_GENERATORS: dict[DgpKind, Callable[[DgpSpec, np.random.Generator], SimDraw]] = {
    **{kind: _linear for kind in LINEAR_KINDS},
    **{kind: _series for kind in SERIES_KINDS},
    DgpKind.BINARY_LOGISTIC: _binary_logistic,
}


def generate(spec: DgpSpec) -> SimDraw:
    """Draw one sample of length T from ``spec`` using ``default_rng(spec.seed)``.

    Linear kinds return a T x p design with theta_0 and true risk 1 (unit
    noise variance); recursive kinds return a Series after discarding the
    burn-in from a zero initial state; binary-logistic returns a design of
    autoregressive regressors on [-1, 1]^d and Bernoulli targets.

    Raises:
        ConfigurationError: If the kind has no generator
    """
    generator = _GENERATORS.get(spec.kind)
    if generator is None:
        raise ConfigurationError(f"no generator for dgp '{spec.kind}'", config_field="dgp")
    rng = np.random.default_rng(spec.seed)
    return generator(spec, rng)
