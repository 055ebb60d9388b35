"""Sub-command handlers: turn a RunConfig into named result tables."""

import logging
from typing import Callable

import pandas as pd

from oos_infer.cli.runconfig import Command, RunConfig
from oos_infer.core.exceptions import ConfigurationError
from oos_infer.lab.studies import (
    McConfig,
    run_coverage_study,
    run_er_histogram,
    run_power_study,
    run_score_diagnostics,
)
from oos_infer.learners.base import LearnerKind
from oos_infer.learners.ridge import BlockedCvConfig
from oos_infer.learners.select import LearnerOptions
from oos_infer.losses.catalog import LossSpec
from oos_infer.mdh.empirical import mdh_table
from oos_infer.mdh.report import MdhMethod
from oos_infer.series.ingest import ingest_csv
from oos_infer.series.models import FeatureConfig

logger = logging.getLogger(__name__)

Frames = dict[str, pd.DataFrame]


def mc_config(config: RunConfig, workers: int) -> McConfig:
    return McConfig(
        n_reps=config.reps,
        pi_grid=config.pi,
        alpha_grid=config.alpha,
        master_seed=config.master_seed,
        parallel_width=workers
    )


def cv_config(config: RunConfig) -> BlockedCvConfig:
    return BlockedCvConfig(k=config.cv.k, train_fraction=config.cv.train_fraction)


def feature_config(config: RunConfig) -> FeatureConfig:
    return FeatureConfig(
        lags=config.lags,
        include_interactions=config.interactions,
        power_degrees=config.powers,
        standardize=config.standardize
    )


def learner_options(config: RunConfig) -> LearnerOptions:
    """Options for the single learner of a simulation study."""
    if len(config.learner) != 1:
        raise ConfigurationError("simulation studies take exactly one learner", config_field="learner")
    try:
        kind = LearnerKind(config.learner[0])
    except ValueError as e:
        known = ", ".join(k.value for k in LearnerKind)
        raise ConfigurationError(f"unknown learner '{config.learner[0]}' (known: {known})", config_field="learner") from e
    return LearnerOptions(
        kind=kind,
        lam=config.lam,
        lambda_rule=config.lambda_rule,
        lambda_c=config.lambda_c,
        cv=cv_config(config),
        dnn=config.dnn
    )


def mdh_methods(config: RunConfig) -> tuple[MdhMethod, ...]:
    try:
        return tuple(MdhMethod(name) for name in config.learner)
    except ValueError as e:
        raise ConfigurationError(
            f"MDH methods must be among ols, ridge, ap; got {', '.join(config.learner)}", config_field="learner"
        ) from e


def loss_spec(config: RunConfig) -> LossSpec:
    return LossSpec.from_name(config.loss, delta=config.delta, alpha=config.loss_alpha, beta=config.loss_beta)


def run_coverage(config: RunConfig, workers: int) -> Frames:
    result = run_coverage_study(
        mc_config(config, workers),
        config.dgp,
        config.T,
        bandwidth=config.bandwidth,
        n_features=config.n_features,
        learner=learner_options(config)
    )
    return result.frames


def run_power(config: RunConfig, workers: int) -> Frames:
    result = run_power_study(
        mc_config(config, workers),
        config.dgp,
        config.T,
        methods=mdh_methods(config),
        features=feature_config(config),
        cv=cv_config(config)
    )
    return result.frames


def run_mdh(config: RunConfig, workers: int) -> Frames:
    """One row per (column, method, pi) for an empirical price file."""
    if config.input is None:
        raise ConfigurationError("mdh needs an input file (--input)", config_field="input")
    if not config.column:
        raise ConfigurationError("mdh needs at least one price column (--column)", config_field="column")
    pairs = {column: ingest_csv(config.input, column, transform=config.transform) for column in config.column}
    table = mdh_table(
        pairs,
        config.pi,
        mdh_methods(config),
        features=feature_config(config),
        cv=cv_config(config),
        alpha=config.alpha[0]
    )
    return {"mdh": table}


def run_er_hist(config: RunConfig, workers: int) -> Frames:
    result = run_er_histogram(
        mc_config(config, workers),
        config.dgp,
        config.T,
        n_features=config.n_features,
        learner=learner_options(config)
    )
    return result.frames


def run_diagnose_score(config: RunConfig, workers: int) -> Frames:
    result = run_score_diagnostics(
        mc_config(config, workers),
        config.dgp,
        config.T,
        loss_spec(config),
        threshold=config.threshold,
        n_features=config.n_features,
        learner=learner_options(config)
    )
    return result.frames


HANDLERS: dict[Command, Callable[[RunConfig, int], Frames]] = {
    Command.COVERAGE: run_coverage,
    Command.POWER: run_power,
    Command.MDH: run_mdh,
    Command.ER_HIST: run_er_hist,
    Command.DIAGNOSE_SCORE: run_diagnose_score,
}
