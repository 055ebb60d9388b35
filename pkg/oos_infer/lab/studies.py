"""Monte Carlo studies: interval coverage, test size and power, ER samples."""

import logging
import math
from typing import Any, Iterable, Literal, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic import ValidationError as PydanticValidationError

from oos_infer.core.exceptions import ConfigurationError, OosInferError
from oos_infer.inference.risk import confidence_interval, covers, delta_and_er, predictive_risk, stylized_er_moments
from oos_infer.lab.dgp import LINEAR_KINDS, SERIES_KINDS, DgpKind, DgpSpec, generate, parse_kind
from oos_infer.lab.runner import run_replications
from oos_infer.lab.seeding import replication_seed
from oos_infer.learners.base import linear_oracle
from oos_infer.learners.diagnostics import fast_rate_diagnostic
from oos_infer.learners.ridge import BlockedCvConfig
from oos_infer.learners.select import LearnerOptions, fit_learner
from oos_infer.losses.catalog import LossKind, LossSpec, residual
from oos_infer.losses.diagnostics import zero_mean_score_diagnostic
from oos_infer.mdh.empirical import run_test
from oos_infer.mdh.report import MdhMethod
from oos_infer.series.models import FeatureConfig
from oos_infer.series.splitting import split

logger = logging.getLogger(__name__)

SPE = LossSpec(kind=LossKind.SPE)
MAX_SCORE_WEIGHT_COLUMNS = 20

# A replication that raises one of these is recorded as failed; anything else aborts the study
REPLICATION_ERRORS = (OosInferError, PydanticValidationError)


class McConfig(BaseModel):
    """Replication count, grids, master seed and worker cap."""

    model_config = ConfigDict(frozen=True)

    n_reps: int = Field(default=500, ge=1)
    pi_grid: tuple[float, ...] = (1.0, 0.25)
    alpha_grid: tuple[float, ...] = (0.10, 0.05, 0.01)
    master_seed: int = Field(default=20240601, ge=0, lt=2**64)
    parallel_width: int = Field(default=1, ge=1)

    @field_validator("pi_grid")
    @classmethod
    def validate_pi_grid(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v:
            raise ValueError("pi grid is empty")
        if any(not (math.isfinite(pi) and pi > 0) for pi in v):
            raise ValueError("pi values must be positive")
        return v

    @field_validator("alpha_grid")
    @classmethod
    def validate_alpha_grid(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v:
            raise ValueError("alpha grid is empty")
        if any(not 0 < a < 1 for a in v):
            raise ValueError("alpha values must lie in (0, 1)")
        return v


class StudyResult(BaseModel):
    """Named output tables of a study and the number of failed replications."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    frames: dict[str, pd.DataFrame]
    n_failed: int = 0


class _ReplicationKey(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: DgpKind
    T: int
    pi: float
    pi_index: int
    rep: int
    seed: int


def _keys(config: McConfig, kinds: Iterable[DgpKind], T_grid: Iterable[int]) -> list[_ReplicationKey]:
    keys = []
    for kind in kinds:
        for T in T_grid:
            for pi_index, pi in enumerate(config.pi_grid):
                for rep in range(config.n_reps):
                    keys.append(_ReplicationKey(
                        kind=kind,
                        T=T,
                        pi=pi,
                        pi_index=pi_index,
                        rep=rep,
                        seed=replication_seed(config.master_seed, kind, T, pi_index, rep)
                    ))
    return keys


def _base_row(key: _ReplicationKey) -> dict[str, Any]:
    return {"dgp": key.kind.value, "T": key.T, "pi": key.pi, "rep": key.rep, "seed": key.seed}


def _failure_message(e: Exception) -> str:
    """One-line reason for a failed replication."""
    if isinstance(e, PydanticValidationError):
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "record"
        return f"invalid {e.title} {location}: {first['msg']}"
    return getattr(e, "message", str(e))


def _check_kinds(kinds: Iterable[Any], allowed: frozenset[DgpKind], study: str) -> list[DgpKind]:
    parsed = [parse_kind(k) for k in kinds]
    bad = [k.value for k in parsed if k not in allowed]
    if bad:
        raise ConfigurationError(f"{study} study does not support dgp {', '.join(bad)}", config_field="dgp")
    if not parsed:
        raise ConfigurationError(f"{study} study needs at least one dgp", config_field="dgp")
    return parsed


# Coverage and ER samples

class _CoverageTask(BaseModel):
    model_config = ConfigDict(frozen=True)

    key: _ReplicationKey
    alphas: tuple[float, ...]
    bandwidth: Union[Literal["auto"], int] = "auto"
    n_features: Optional[int] = None
    learner: LearnerOptions = Field(default_factory=LearnerOptions)


def _coverage_replication(task: _CoverageTask) -> dict[str, Any]:
    """Fit on the first R rows and evaluate the SPE interval on the rest."""
    key = task.key
    row = _base_row(key)
    try:
        draw = generate(DgpSpec(kind=key.kind, T=key.T, seed=key.seed, n_features=task.n_features))
        plan = split(key.T, pi=key.pi)
        design = draw.design
        model = fit_learner(design, plan, task.learner)
        test = design.test(plan)
        report = delta_and_er(model, SPE, test, draw.theta_0, draw.true_risk, alpha=task.alphas[0], bandwidth=task.bandwidth)
        r2 = predictive_risk(model, test, draw.theta_0)
        er_mean, er_var = stylized_er_moments(r2, report.n_oos)
        row.update({
            "R": plan.R,
            "P": plan.P,
            "p": design.n_columns,
            "s": draw.sparsity,
            "lambda": model.lambda_used,
            "converged": model.diagnostics.converged,
            "risk": report.empirical_risk,
            "true_risk": draw.true_risk,
            "delta": report.delta,
            "er": report.er,
            "omega": report.omega_hat,
            "r2": r2,
            "er_stylized_mean": er_mean,
            "er_stylized_var": er_var,
            "fast_rate": fast_rate_diagnostic(model, linear_oracle(draw.theta_0), test),
            "intervals": [
                (alpha, *confidence_interval(report.empirical_risk, report.omega_hat, report.n_oos, alpha))
                for alpha in task.alphas
            ],
            "error": None,
        })
    except REPLICATION_ERRORS as e:
        message = _failure_message(e)
        logger.warning(f"Replication {key.rep} of {key.kind.value} T={key.T} pi={key.pi} failed: {message}")
        row.update({"intervals": [], "error": message})
    return row


SAMPLE_COLUMNS = [
    "dgp", "T", "pi", "rep", "seed", "R", "P", "p", "s", "lambda", "converged",
    "risk", "true_risk", "delta", "er", "omega", "r2", "er_stylized_mean", "er_stylized_var", "fast_rate", "error",
]


def _coverage_rows(
    config: McConfig,
    kinds: list[DgpKind],
    T_grid: Iterable[int],
    bandwidth: Union[Literal["auto"], int],
    n_features: Optional[int],
    learner: LearnerOptions
) -> tuple[pd.DataFrame, pd.DataFrame]:
    tasks = [
        _CoverageTask(key=key, alphas=config.alpha_grid, bandwidth=bandwidth, n_features=n_features, learner=learner)
        for key in _keys(config, kinds, T_grid)
    ]
    rows = run_replications(_coverage_replication, tasks, config.parallel_width)

    intervals = []
    for row in rows:
        for alpha, lo, hi in row["intervals"]:
            intervals.append({
                "dgp": row["dgp"], "T": row["T"], "pi": row["pi"], "rep": row["rep"], "alpha": alpha,
                "risk": row["risk"], "omega": row["omega"], "ci_lo": lo, "ci_hi": hi,
                "covered": covers((lo, hi), row["true_risk"]),
            })
    samples = pd.DataFrame(rows).reindex(columns=SAMPLE_COLUMNS)
    # explicit dtypes: a cell whose replications all failed contributes no rows
    interval_frame = pd.DataFrame(
        intervals, columns=["dgp", "T", "pi", "rep", "alpha", "risk", "omega", "ci_lo", "ci_hi", "covered"]
    ).astype({"T": "int64", "pi": "float64", "rep": "int64", "alpha": "float64", "covered": "bool"})
    return samples, interval_frame


def _failures(samples: pd.DataFrame) -> pd.DataFrame:
    failed = samples["error"].notna()
    return (
        samples.assign(failed=failed)
        .groupby(["dgp", "T", "pi"], sort=False)["failed"]
        .agg(n_reps="size", n_failed="sum")
        .reset_index()
    )


def run_coverage_study(
    config: McConfig,
    dgps: Iterable[Any],
    T_grid: Iterable[int],
    bandwidth: Union[Literal["auto"], int] = "auto",
    n_features: Optional[int] = None,
    learner: Optional[LearnerOptions] = None
) -> StudyResult:
    """Coverage frequency of the true risk by the normal interval.

    For each (dgp, T, pi, alpha) the learner (by default Lasso with
    lambda = sqrt(log p / R)) is fit on the first R rows and the SPE interval is formed on the remaining P.
    Failed replications are excluded from the frequency and counted in
    ``n_failed``.

    Args:
        config: Replications, grids and seed
        dgps: Linear processes to simulate
        T_grid: Sample lengths
        bandwidth: HAC bandwidth for the interval
        n_features: p for the linear designs (defaults to T)
        learner: Learner and tuning (Lasso with the square-root rule when None)

    Returns:
        StudyResult with frames ``coverage`` (long), ``coverage_wide``,
        ``samples`` (per replication) and ``intervals`` (per replication and level)
    """
    kinds = _check_kinds(dgps, LINEAR_KINDS, "coverage")
    T_grid = list(T_grid)
    samples, intervals = _coverage_rows(config, kinds, T_grid, bandwidth, n_features, learner or LearnerOptions())

    ok = samples[samples["error"].isna()]
    moments = ok.groupby(["dgp", "T", "pi"], sort=False)[["delta", "er", "r2"]].mean().reset_index()
    moments = moments.rename(columns={"delta": "mean_delta", "er": "mean_er", "r2": "mean_r2"})
    table = (
        intervals.groupby(["dgp", "T", "pi", "alpha"], sort=False)["covered"].mean()
        .rename("coverage").reset_index()
    )
    table["nominal"] = 1.0 - table["alpha"]
    table = table.merge(_failures(samples), on=["dgp", "T", "pi"], how="right")
    table = table.merge(moments, on=["dgp", "T", "pi"], how="left")
    table = table[["dgp", "T", "pi", "alpha", "nominal", "coverage", "n_reps", "n_failed", "mean_delta", "mean_er", "mean_r2"]]

    covered_cells = table.dropna(subset=["alpha"])
    if covered_cells.empty:
        wide = pd.DataFrame(columns=["dgp", "T"])
    else:
        wide = covered_cells.pivot_table(
            index=["dgp", "T"], columns=["pi", "nominal"], values="coverage", sort=False
        )
        wide.columns = [f"pi={pi:g} nominal={nominal:.2f}" for pi, nominal in wide.columns]
        wide = wide.reset_index()

    n_failed = int(samples["error"].notna().sum())
    logger.info(f"Coverage study finished: {len(samples)} replications, {n_failed} failed")
    return StudyResult(
        name="coverage",
        frames={"coverage": table, "coverage_wide": wide, "samples": samples, "intervals": intervals},
        n_failed=n_failed
    )


def run_er_histogram(
    config: McConfig,
    dgps: Iterable[Any],
    T_grid: Iterable[int],
    n_features: Optional[int] = None,
    learner: Optional[LearnerOptions] = None
) -> StudyResult:
    """Per-replication Delta, ER and r^2 samples for histograms across T."""
    kinds = _check_kinds(dgps, LINEAR_KINDS, "er-hist")
    samples, _ = _coverage_rows(config, kinds, list(T_grid), "auto", n_features, learner or LearnerOptions())
    summary = (
        samples[samples["error"].isna()]
        .groupby(["dgp", "T", "pi"], sort=False)
        .agg(mean_delta=("delta", "mean"), mean_er=("er", "mean"), sd_er=("er", "std"),
             mean_r2=("r2", "mean"), mean_fast_rate=("fast_rate", "mean"))
        .reset_index()
    )
    n_failed = int(samples["error"].notna().sum())
    logger.info(f"ER sampling finished: {len(samples)} replications, {n_failed} failed")
    return StudyResult(name="er_hist", frames={"er_samples": samples, "er_summary": summary}, n_failed=n_failed)


# Size and power

class _PowerTask(BaseModel):
    model_config = ConfigDict(frozen=True)

    key: _ReplicationKey
    methods: tuple[MdhMethod, ...]
    features: FeatureConfig
    cv: BlockedCvConfig


def _power_replication(task: _PowerTask) -> list[dict[str, Any]]:
    key = task.key
    failed = {"t_stat": np.nan, "p_value": np.nan, "selected_lag": None}
    try:
        series = generate(DgpSpec(kind=key.kind, T=key.T, seed=key.seed)).series
    except REPLICATION_ERRORS as e:
        message = _failure_message(e)
        logger.warning(f"Draw failed on rep {key.rep} of {key.kind.value} T={key.T}: {message}")
        return [_base_row(key) | {"method": m.value, **failed, "error": message} for m in task.methods]

    rows = []
    for method in task.methods:
        row = _base_row(key) | {"method": method.value}
        try:
            report = run_test(series, method, key.pi, features=task.features, cv=task.cv, seed=key.seed)
            row.update({"t_stat": report.t_stat, "p_value": report.p_value,
                        "selected_lag": report.selected_lag, "error": None})
        except REPLICATION_ERRORS as e:
            message = _failure_message(e)
            logger.warning(f"{method.value} test failed on rep {key.rep} of {key.kind.value} T={key.T}: {message}")
            row.update({**failed, "error": message})
        rows.append(row)
    return rows


def run_power_study(
    config: McConfig,
    dgps: Iterable[Any],
    T_grid: Iterable[int],
    methods: Iterable[Any] = (MdhMethod.OLS, MdhMethod.RIDGE, MdhMethod.AP),
    features: Optional[FeatureConfig] = None,
    cv: Optional[BlockedCvConfig] = None
) -> StudyResult:
    """Rejection frequencies of the MDH tests per (dgp, T, pi, method, alpha).

    Under the GARCH(1,1) null these are sizes; under the other processes, power.
    """
    kinds = _check_kinds(dgps, SERIES_KINDS, "power")
    methods = tuple(MdhMethod(m) for m in methods)
    tasks = [
        _PowerTask(key=key, methods=methods, features=features or FeatureConfig(), cv=cv or BlockedCvConfig())
        for key in _keys(config, kinds, list(T_grid))
    ]
    rows = [row for batch in run_replications(_power_replication, tasks, config.parallel_width) for row in batch]
    samples = pd.DataFrame(
        rows, columns=["dgp", "T", "pi", "rep", "seed", "method", "t_stat", "p_value", "selected_lag", "error"]
    )

    records = []
    group_cols = ["dgp", "T", "pi", "method"]
    for (dgp, T, pi, method), group in samples.groupby(group_cols, sort=False):
        ok = group["p_value"].dropna()
        for alpha in config.alpha_grid:
            records.append({
                "dgp": dgp, "T": T, "pi": pi, "method": method, "alpha": alpha,
                "rejection_rate": float((ok < alpha).mean()) if len(ok) else np.nan,
                "n_reps": len(group), "n_failed": int(group["error"].notna().sum()),
            })
    table = pd.DataFrame(records, columns=group_cols + ["alpha", "rejection_rate", "n_reps", "n_failed"])

    wide = table.pivot_table(index=["dgp", "T", "method", "pi"], columns="alpha", values="rejection_rate", sort=False)
    wide.columns = [f"alpha={alpha:g}" for alpha in wide.columns]
    wide = wide.reset_index()

    n_failed = int(samples["error"].notna().sum())
    logger.info(f"Power study finished: {len(samples)} tests, {n_failed} failed")
    return StudyResult(name="power", frames={"power": table, "power_wide": wide, "tests": samples}, n_failed=n_failed)


# Zero-mean score

class _ScoreTask(BaseModel):
    model_config = ConfigDict(frozen=True)

    key: _ReplicationKey
    loss: LossSpec
    threshold: float
    n_features: Optional[int] = None
    learner: LearnerOptions = Field(default_factory=LearnerOptions)


def _score_replication(task: _ScoreTask) -> dict[str, Any]:
    """Score diagnostic on test residuals of a fitted learner, weights (1, x_support)."""
    key = task.key
    row = _base_row(key) | {"loss": task.loss.kind.value}
    try:
        draw = generate(DgpSpec(kind=key.kind, T=key.T, seed=key.seed, n_features=task.n_features))
        plan = split(key.T, pi=key.pi)
        model = fit_learner(draw.design, plan, task.learner, loss=task.loss)
        test = draw.design.test(plan)
        eps = residual(task.loss, test.target, model.predict_design(test))
        if draw.theta_0 is not None:
            support = np.flatnonzero(draw.theta_0)[:MAX_SCORE_WEIGHT_COLUMNS]
        else:
            support = np.arange(min(test.n_columns, MAX_SCORE_WEIGHT_COLUMNS))
        weights = np.column_stack([np.ones(test.n_rows), np.asarray(test.rows)[:, support]])
        report = zero_mean_score_diagnostic(task.loss, eps, weights, threshold=task.threshold)
        row.update({"n": report.n, "mean_score_norm": report.mean_score_norm,
                    "studentized": report.studentized, "flagged": report.flagged, "error": None})
    except REPLICATION_ERRORS as e:
        message = _failure_message(e)
        logger.warning(f"Score diagnostic failed on rep {key.rep} of {key.kind.value}: {message}")
        row.update({"error": message})
    return row


def run_score_diagnostics(
    config: McConfig,
    dgps: Iterable[Any],
    T_grid: Iterable[int],
    loss: LossSpec,
    threshold: float = 3.0,
    n_features: Optional[int] = None,
    learner: Optional[LearnerOptions] = None
) -> StudyResult:
    """Share of replications whose test residuals fail the zero-mean-score check.

    The flag rate is left empty for losses that are only reported (ASMSPE).
    """
    kinds = _check_kinds(dgps, LINEAR_KINDS | {DgpKind.BINARY_LOGISTIC}, "diagnose-score")
    tasks = [
        _ScoreTask(key=key, loss=loss, threshold=threshold, n_features=n_features, learner=learner or LearnerOptions())
        for key in _keys(config, kinds, list(T_grid))
    ]
    rows = run_replications(_score_replication, tasks, config.parallel_width)
    samples = pd.DataFrame(rows).reindex(
        columns=["dgp", "T", "pi", "rep", "seed", "loss", "n", "mean_score_norm", "studentized", "flagged", "error"]
    )

    records = []
    for (dgp, T, pi), group in samples.groupby(["dgp", "T", "pi"], sort=False):
        ok = group[group["error"].isna()]
        flags = ok["flagged"].dropna()
        records.append({
            "dgp": dgp, "T": T, "pi": pi, "loss": loss.kind.value, "threshold": threshold,
            "flag_rate": float(flags.astype(bool).mean()) if len(flags) else np.nan,
            "mean_studentized": float(ok["studentized"].mean()) if len(ok) else np.nan,
            "n_reps": len(group), "n_failed": int(group["error"].notna().sum()),
        })
    table = pd.DataFrame(records)

    n_failed = int(samples["error"].notna().sum())
    logger.info(f"Score diagnostics finished: {len(samples)} replications, {n_failed} failed")
    return StudyResult(name="score", frames={"score": table, "score_samples": samples}, n_failed=n_failed)
