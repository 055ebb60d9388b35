"""Learner choice by name, as used by the study drivers and the CLI."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from oos_infer.learners.base import FittedModel, LearnerKind
from oos_infer.learners.dnn import OptimizerConfig, fit_dnn
from oos_infer.learners.lasso import LambdaRule, fit_lasso
from oos_infer.learners.network import DnnArchitecture
from oos_infer.learners.ols import fit_ols
from oos_infer.learners.ridge import BlockedCvConfig, fit_ridge
from oos_infer.losses.catalog import LossKind, LossSpec
from oos_infer.series.models import DesignMatrix, SplitPlan


class DnnOptions(BaseModel):
    """Network shape, bounds and optimizer settings."""

    model_config = ConfigDict(frozen=True)

    depth: int = Field(default=2, ge=0)
    width: int = Field(default=8, ge=1)
    B: float = Field(default=10.0, gt=0)
    F: float = Field(default=10.0, gt=0)
    tau: float = Field(default=0.01, gt=0)
    lr: float = Field(default=0.01, gt=0)
    epochs: int = Field(default=200, ge=1)
    batch: int = Field(default=32, ge=1)
    seed: int = Field(default=0, ge=0)

    def architecture(self, input_dim: int) -> DnnArchitecture:
        return DnnArchitecture.build(
            input_dim=input_dim,
            depth=self.depth,
            width=self.width,
            weight_bound=self.B,
            output_bound=self.F,
            clip_threshold=self.tau
        )

    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(learning_rate=self.lr, epochs=self.epochs, batch=self.batch, seed=self.seed)


class LearnerOptions(BaseModel):
    """Which learner to fit and its tuning."""

    model_config = ConfigDict(frozen=True)

    kind: LearnerKind = LearnerKind.LASSO
    lam: Optional[float] = Field(default=None, ge=0, description="Fixed penalty; rule or CV when None")
    lambda_rule: LambdaRule = LambdaRule.SQRT_LOGP_OVER_R
    lambda_c: float = Field(default=1.0, gt=0)
    cv: BlockedCvConfig = Field(default_factory=BlockedCvConfig)
    dnn: DnnOptions = Field(default_factory=DnnOptions)


def fit_learner(
    design: DesignMatrix,
    split: Optional[SplitPlan],
    options: LearnerOptions,
    loss: Optional[LossSpec] = None
) -> FittedModel:
    """Fit the learner named in ``options`` on the estimation rows.

    ``loss`` only matters for the network, which trains on cross-entropy or
    MSPE; any other loss trains it on MSPE.
    """
    if options.kind is LearnerKind.OLS:
        return fit_ols(design, split)
    if options.kind is LearnerKind.RIDGE:
        if options.lam is not None:
            return fit_ridge(design, split, lam=options.lam)
        return fit_ridge(design, split, cv=options.cv)
    if options.kind is LearnerKind.LASSO:
        if options.lam is not None:
            return fit_lasso(design, split, lam=options.lam)
        return fit_lasso(design, split, rule=options.lambda_rule, c=options.lambda_c)

    train_loss = loss if loss is not None and loss.kind is LossKind.CROSS_ENTROPY else LossSpec(kind=LossKind.MSPE)
    return fit_dnn(
        design,
        split,
        arch=options.dnn.architecture(design.n_columns),
        loss=train_loss,
        opt=options.dnn.optimizer(),
        lam=options.lam or 0.0
    )
