"""Deep ReLU network: architecture, forward pass, back-propagation, clipped norm."""

import math
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from oos_infer.core.exceptions import DomainError
from oos_infer.losses.catalog import LossSpec, loss_gradient, loss_value


class DnnArchitecture(BaseModel):
    """Depth L, widths w_0..w_{L+1} and the parameter/output bounds."""

    model_config = ConfigDict(frozen=True)

    widths: tuple[int, ...] = Field(description="w_0 (input dimension) .. w_{L+1} = 1")
    weight_bound: float = Field(default=10.0, gt=0, description="B: |theta_j| <= B")
    output_bound: float = Field(default=10.0, gt=0, description="F: |m(theta, x)| <= F")
    clip_threshold: float = Field(default=0.01, gt=0, description="tau of the clipped L1 norm")

    @field_validator("widths")
    @classmethod
    def validate_widths(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if len(v) < 2:
            raise ValueError("widths needs at least input and output entries")
        if any(w < 1 for w in v):
            raise ValueError("all widths must be >= 1")
        return v

    @model_validator(mode="after")
    def check_output_width(self) -> "DnnArchitecture":
        if self.widths[-1] != 1:
            raise ValueError("output width w_{L+1} must be 1")
        return self

    @classmethod
    def build(cls, input_dim: int, depth: int, width: int, **bounds: Any) -> "DnnArchitecture":
        """Architecture with ``depth`` hidden layers of equal ``width``."""
        return cls(widths=(input_dim,) + (width,) * depth + (1,), **bounds)

    @property
    def depth(self) -> int:
        return len(self.widths) - 2

    @property
    def input_dim(self) -> int:
        return self.widths[0]

    @property
    def layer_shapes(self) -> list[tuple[int, int]]:
        """(w_j, w_{j-1}) for each affine map A_j."""
        return [(self.widths[j], self.widths[j - 1]) for j in range(1, len(self.widths))]

    @property
    def n_parameters(self) -> int:
        return sum(out * (inp + 1) for out, inp in self.layer_shapes)

    def weight_mask(self) -> np.ndarray:
        """True for weight entries, False for biases (biases are not penalized)."""
        mask = []
        for out, inp in self.layer_shapes:
            mask.append(np.ones(out * inp, dtype=bool))
            mask.append(np.zeros(out, dtype=bool))
        return np.concatenate(mask)


def unpack(arch: DnnArchitecture, theta: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split theta = (vec W_1, b_1, ..., vec W_{L+1}, b_{L+1}) into layers."""
    if theta.size != arch.n_parameters:
        raise DomainError(
            f"parameter vector has {theta.size} entries, architecture needs {arch.n_parameters}",
            field="theta"
        )
    layers = []
    offset = 0
    for out, inp in arch.layer_shapes:
        W = theta[offset:offset + out * inp].reshape(out, inp)
        offset += out * inp
        b = theta[offset:offset + out]
        offset += out
        layers.append((W, b))
    return layers


def initialize(arch: DnnArchitecture, rng: np.random.Generator) -> np.ndarray:
    """He-uniform weights, zero biases, clipped to the weight bound."""
    parts = []
    for out, inp in arch.layer_shapes:
        limit = math.sqrt(6.0 / inp)
        parts.append(rng.uniform(-limit, limit, size=out * inp))
        parts.append(np.zeros(out))
    theta = np.concatenate(parts)
    return np.clip(theta, -arch.weight_bound, arch.weight_bound)


def forward(arch: DnnArchitecture, theta: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """m(theta, x) for every row, clamped to [-F, F]."""
    h = np.asarray(rows, dtype=float)
    layers = unpack(arch, theta)
    for W, b in layers[:-1]:
        h = np.maximum(h @ W.T + b, 0.0)
    W, b = layers[-1]
    out = (h @ W.T + b)[:, 0]
    return np.clip(out, -arch.output_bound, arch.output_bound)


def network_objective_and_gradient(
    arch: DnnArchitecture,
    theta: np.ndarray,
    rows: np.ndarray,
    target: np.ndarray,
    loss: LossSpec
) -> tuple[float, np.ndarray]:
    """Mean loss over the rows and its gradient in theta.

    The clamp contributes a zero derivative where it is active.

    Returns:
        (objective, gradient) with gradient in the flat theta layout
    """
    x = np.asarray(rows, dtype=float)
    y = np.asarray(target, dtype=float)
    n = x.shape[0]
    layers = unpack(arch, theta)

    activations = [x]
    pre_activations = []
    h = x
    for W, b in layers[:-1]:
        z = h @ W.T + b
        pre_activations.append(z)
        h = np.maximum(z, 0.0)
        activations.append(h)
    W_out, b_out = layers[-1]
    raw = (h @ W_out.T + b_out)[:, 0]
    F = arch.output_bound
    m = np.clip(raw, -F, F)

    objective = float(np.mean(loss_value(loss, y, m)))
    upstream = np.asarray(loss_gradient(loss, y, m)) / n
    upstream = np.where(np.abs(raw) <= F, upstream, 0.0)[:, None]

    grads: list[tuple[np.ndarray, np.ndarray]] = []
    delta = upstream
    for j in range(len(layers) - 1, -1, -1):
        W, _ = layers[j]
        a = activations[j]
        grads.append((delta.T @ a, delta.sum(axis=0)))
        if j > 0:
            delta = (delta @ W) * (pre_activations[j - 1] > 0)
    grads.reverse()

    gradient = np.concatenate([np.concatenate([gW.ravel(), gb]) for gW, gb in grads])
    return objective, gradient


def clipped_norm(theta: Any, tau: float) -> float:
    """Clipped L1 norm: sum_j min(|theta_j| / tau, 1).

    Raises:
        DomainError: If tau <= 0
    """
    if tau <= 0:
        raise DomainError(f"clip threshold tau must be positive, got {tau}", field="tau")
    values = np.abs(np.asarray(theta, dtype=float))
    return float(np.sum(np.minimum(values / tau, 1.0)))


def clipped_norm_subgradient(theta: np.ndarray, tau: float) -> np.ndarray:
    """sign(theta_j) / tau where |theta_j| < tau, else 0 (flat side, including |theta_j| = tau)."""
    return np.where(np.abs(theta) < tau, np.sign(theta) / tau, 0.0)
