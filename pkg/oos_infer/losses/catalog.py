"""Catalog of prediction losses l(y, m) and their scores psi."""

import logging
from enum import Enum
from typing import Any, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit

from oos_infer.core.exceptions import DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class LossKind(str, Enum):
    """Supported loss families."""

    MSPE = "mspe"
    SPE = "spe"
    MAD = "mad"
    HUBER = "huber"
    ASMSPE = "asmspe"
    LOGCOSH = "logcosh"
    CROSS_ENTROPY = "cross_entropy"
    COVARIANCE = "covariance"


# Constant c with dl/dm = c * psi, given the sign convention of psi.
_SCORE_SCALE = {
    LossKind.MSPE: -1.0,
    LossKind.SPE: -2.0,
    LossKind.MAD: 2.0,
    LossKind.HUBER: -1.0,
    LossKind.ASMSPE: -2.0,
    LossKind.LOGCOSH: -1.0,
    LossKind.CROSS_ENTROPY: -1.0,
    LossKind.COVARIANCE: 2.0,
}


class LossSpec(BaseModel):
    """A loss kind together with its parameters."""

    model_config = ConfigDict(frozen=True)

    kind: LossKind
    delta: float = Field(default=1.0, gt=0, description="Huber kink")
    alpha: float = Field(default=1.0, gt=0, description="ASMSPE weight for e >= 0")
    beta: float = Field(default=1.0, gt=0, description="ASMSPE weight for e < 0")

    @classmethod
    def from_name(cls, name: str, **params: Any) -> "LossSpec":
        """Build a spec from its CLI name, e.g. ``LossSpec.from_name("huber", delta=1.345)``."""
        try:
            kind = LossKind(name.strip().lower().replace("-", "_"))
        except ValueError as e:
            known = ", ".join(k.value for k in LossKind)
            raise DomainError(f"unknown loss '{name}'; expected one of {known}", field="loss") from e
        return cls(kind=kind, **{k: v for k, v in params.items() if v is not None})


def _out(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def _check_binary(spec: LossSpec, y: np.ndarray) -> None:
    if spec.kind is LossKind.CROSS_ENTROPY and not np.all((y == 0) | (y == 1)):
        raise DomainError("cross-entropy loss requires y in {0, 1}", field="y")


def logistic(m: ArrayLike) -> ArrayLike:
    """Logit link Lambda(m) = exp(m) / (1 + exp(m))."""
    return _out(expit(np.asarray(m, dtype=float)))


def residual(spec: LossSpec, y: ArrayLike, m: ArrayLike) -> ArrayLike:
    """Prediction error entering the score.

    y - m for the regression losses, y - Lambda(m) for cross-entropy and
    y itself for the covariance loss.
    """
    y = np.asarray(y, dtype=float)
    m = np.asarray(m, dtype=float)
    _check_binary(spec, y)
    if spec.kind is LossKind.CROSS_ENTROPY:
        return _out(y - expit(m))
    if spec.kind is LossKind.COVARIANCE:
        return _out(np.broadcast_to(y, np.broadcast(y, m).shape).copy())
    return _out(y - m)


def psi(spec: LossSpec, eps: ArrayLike) -> ArrayLike:
    """Score function psi(eps) evaluated at prediction errors."""
    e = np.asarray(eps, dtype=float)
    kind = spec.kind
    if kind in (LossKind.MSPE, LossKind.SPE, LossKind.CROSS_ENTROPY, LossKind.COVARIANCE):
        out = e.copy()
    elif kind is LossKind.MAD:
        out = (e <= 0).astype(float) - 0.5
    elif kind is LossKind.HUBER:
        out = np.where(np.abs(e) <= spec.delta, e, spec.delta * np.sign(e))
    elif kind is LossKind.ASMSPE:
        out = np.where(e >= 0, spec.alpha * e, spec.beta * e)
    elif kind is LossKind.LOGCOSH:
        out = np.tanh(e)
    else:  # pragma: no cover
        raise DomainError(f"unsupported loss {kind}")
    return _out(out)


def score(spec: LossSpec, y: ArrayLike, m: ArrayLike) -> ArrayLike:
    """psi evaluated at the residual of (y, m)."""
    return psi(spec, residual(spec, y, m))


def score_scale(spec: LossSpec) -> float:
    """Constant c such that the derivative of the loss in m equals c * score."""
    return _SCORE_SCALE[spec.kind]


def loss_gradient(spec: LossSpec, y: ArrayLike, m: ArrayLike) -> ArrayLike:
    """Derivative of l(y, m) with respect to m."""
    return _out(score_scale(spec) * np.asarray(score(spec, y, m)))


def loss_value(spec: LossSpec, y: ArrayLike, m: ArrayLike) -> ArrayLike:
    """Evaluate l(y, m), elementwise for arrays.

    Raises:
        DomainError: For cross-entropy with y outside {0, 1}
    """
    y = np.asarray(y, dtype=float)
    m = np.asarray(m, dtype=float)
    _check_binary(spec, y)
    e = y - m
    kind = spec.kind

    if kind is LossKind.MSPE:
        out = 0.5 * e ** 2
    elif kind is LossKind.SPE:
        out = e ** 2
    elif kind is LossKind.MAD:
        out = np.abs(e)
    elif kind is LossKind.HUBER:
        d = spec.delta
        a = np.abs(e)
        out = np.where(a <= d, 0.5 * e ** 2, d * a - 0.5 * d ** 2)
    elif kind is LossKind.ASMSPE:
        out = np.where(e >= 0, spec.alpha * e ** 2, spec.beta * e ** 2)
    elif kind is LossKind.LOGCOSH:
        a = np.abs(e)
        out = a + np.log1p(np.exp(-2.0 * a)) - np.log(2.0)
    elif kind is LossKind.CROSS_ENTROPY:
        out = -y * m + np.logaddexp(0.0, m)
    elif kind is LossKind.COVARIANCE:
        out = 2.0 * y * m
    else:  # pragma: no cover
        raise DomainError(f"unsupported loss {kind}")
    return _out(out)
