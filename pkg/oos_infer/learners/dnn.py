"""Penalized deep ReLU network trained by mini-batch descent."""

import logging
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from oos_infer.core.exceptions import DivergenceError, DomainError
from oos_infer.learners.base import FitDiagnostics, FittedModel, LearnerKind, is_monotone, training_arrays
from oos_infer.learners.network import (
    DnnArchitecture,
    clipped_norm,
    clipped_norm_subgradient,
    initialize,
    network_objective_and_gradient,
)
from oos_infer.losses.catalog import LossKind, LossSpec
from oos_infer.series.models import DesignMatrix, SplitPlan

logger = logging.getLogger(__name__)

SUPPORTED_LOSSES = (LossKind.CROSS_ENTROPY, LossKind.MSPE)


class OptimizerConfig(BaseModel):
    """Plain mini-batch descent with a fixed step."""

    model_config = ConfigDict(frozen=True)

    learning_rate: float = Field(default=0.01, gt=0)
    epochs: int = Field(default=200, ge=1)
    batch: int = Field(default=32, ge=1)
    seed: int = Field(default=0, ge=0)


def _penalized_objective(
    arch: DnnArchitecture,
    theta: np.ndarray,
    X: np.ndarray,
    y: np.ndarray,
    loss: LossSpec,
    lam: float,
    weights: np.ndarray
) -> float:
    risk, _ = network_objective_and_gradient(arch, theta, X, y, loss)
    return risk + lam * clipped_norm(theta[weights], arch.clip_threshold)


def fit_dnn(
    design: DesignMatrix,
    split: Optional[SplitPlan] = None,
    arch: Optional[DnnArchitecture] = None,
    loss: Optional[LossSpec] = None,
    opt: Optional[OptimizerConfig] = None,
    lam: float = 0.0,
    callback: Optional[Callable[[np.ndarray], None]] = None
) -> FittedModel:
    """Minimize mean loss + lambda * clipped-L1(weights) over the network class.

    After each step the parameters are projected onto |theta_j| <= B; the
    output is clamped to [-F, F] inside the forward pass. Biases are not
    penalized. Training is deterministic given ``opt.seed``.

    Args:
        design: Regressors (no intercept column needed) and target
        split: Selects estimation rows (all rows when None)
        arch: Network architecture; its input width must equal the design width
        loss: Cross-entropy or MSPE
        opt: Optimizer settings
        lam: Penalty on the clipped L1 norm
        callback: Called with a read-only view of theta after every step

    Returns:
        FittedModel with learner_kind ``dnn``, flat theta and its architecture

    Raises:
        DomainError: For unsupported losses, mismatched widths or negative lambda
        DivergenceError: If the objective becomes non-finite
    """
    loss = loss or LossSpec(kind=LossKind.MSPE)
    opt = opt or OptimizerConfig()
    if loss.kind not in SUPPORTED_LOSSES:
        raise DomainError(f"network training supports cross_entropy and mspe, not {loss.kind.value}", field="loss")
    if lam < 0:
        raise DomainError(f"penalty must be non-negative, got {lam}", field="lambda")

    X, y = training_arrays(design, split)
    if arch is None:
        arch = DnnArchitecture.build(input_dim=X.shape[1], depth=2, width=8)
    if arch.input_dim != X.shape[1]:
        raise DomainError(
            f"architecture input width {arch.input_dim} does not match {X.shape[1]} design columns",
            field="arch"
        )
    if loss.kind is LossKind.CROSS_ENTROPY and not np.all((y == 0) | (y == 1)):
        raise DomainError("cross-entropy training needs a binary target", field="target")

    rng = np.random.default_rng(opt.seed)
    theta = initialize(arch, rng)
    weights = arch.weight_mask()
    B = arch.weight_bound
    n = X.shape[0]

    path = [_penalized_objective(arch, theta, X, y, loss, lam, weights)]
    for epoch in range(1, opt.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, opt.batch):
            batch = order[start:start + opt.batch]
            _, grad = network_objective_and_gradient(arch, theta, X[batch], y[batch], loss)
            if lam > 0:
                grad = grad + lam * np.where(weights, clipped_norm_subgradient(theta, arch.clip_threshold), 0.0)
            theta = np.clip(theta - opt.learning_rate * grad, -B, B)
            if callback is not None:
                view = theta.view()
                view.setflags(write=False)
                callback(view)

        objective = _penalized_objective(arch, theta, X, y, loss, lam, weights)
        if not np.isfinite(objective):
            raise DivergenceError(
                f"training objective became non-finite at epoch {epoch} "
                f"(learning rate {opt.learning_rate}); lower the learning rate",
                epoch=epoch,
                learning_rate=opt.learning_rate
            )
        path.append(objective)
        logger.debug(f"DNN epoch {epoch}: objective {objective:.6f}")

    logger.info(f"Trained network {arch.widths} for {opt.epochs} epochs, objective {path[-1]:.6f}")
    return FittedModel(
        theta=theta,
        learner_kind=LearnerKind.DNN,
        lambda_used=float(lam),
        diagnostics=FitDiagnostics(
            iterations=opt.epochs,
            final_objective=path[-1],
            converged=is_monotone(tuple(path)),
            objective_path=tuple(path)
        ),
        architecture=arch,
        column_names=design.column_names
    )
