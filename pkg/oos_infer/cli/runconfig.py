"""Run configuration: flat key=value files, command defaults and flag overrides."""

import logging
from enum import Enum
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from oos_infer.core.config import Settings
from oos_infer.core.exceptions import ConfigurationError
from oos_infer.learners.lasso import LambdaRule
from oos_infer.learners.select import DnnOptions
from oos_infer.series.ingest import Transform

logger = logging.getLogger(__name__)


class Command(str, Enum):
    """CLI sub-commands."""

    COVERAGE = "coverage"
    POWER = "power"
    MDH = "mdh"
    ER_HIST = "er-hist"
    DIAGNOSE_SCORE = "diagnose-score"


class CvOptions(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    k: int = Field(default=2, ge=1)
    train_fraction: float = Field(default=0.8, gt=0, lt=1)


class RunConfig(BaseModel):
    """Everything one CLI run needs; serialized into its manifest."""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    command: Command
    output_dir: str = "results"
    master_seed: int = Field(default=20240601, ge=0, lt=2**64)
    format: Literal["csv", "json"] = "csv"
    threads: int = Field(default=1, ge=1, le=512)

    # Monte Carlo grid
    reps: int = Field(default=500, ge=1)
    dgp: tuple[str, ...] = ()
    T: tuple[int, ...] = (1000,)
    pi: tuple[float, ...] = (1.0, 0.25)
    alpha: tuple[float, ...] = (0.10, 0.05, 0.01)
    bandwidth: Union[Literal["auto"], int] = "auto"
    n_features: Optional[int] = Field(default=None, ge=1)

    # Learners
    learner: tuple[str, ...] = ()
    lam: Optional[float] = Field(default=None, ge=0, alias="lambda")
    lambda_rule: LambdaRule = LambdaRule.SQRT_LOGP_OVER_R
    lambda_c: float = Field(default=1.0, gt=0)
    cv: CvOptions = Field(default_factory=CvOptions)
    dnn: DnnOptions = Field(default_factory=DnnOptions)

    # Empirical data and features
    input: Optional[str] = None
    column: tuple[str, ...] = ()
    transform: Transform = Transform.INCREMENTS
    lags: int = Field(default=30, ge=1)
    interactions: bool = True
    powers: tuple[int, ...] = (2, 3, 4)
    standardize: bool = False

    # Losses
    loss: str = "spe"
    delta: float = Field(default=1.0, gt=0)
    loss_alpha: float = Field(default=1.0, gt=0)
    loss_beta: float = Field(default=1.0, gt=0)
    threshold: float = Field(default=3.0, gt=0)

    @field_validator("dgp", "T", "pi", "alpha", "learner", "column", "powers", mode="before")
    @classmethod
    def split_list(cls, v: Any) -> Any:
        """Comma-separated strings and scalars become tuples."""
        if isinstance(v, str):
            return tuple(item.strip() for item in v.split(",") if item.strip())
        if isinstance(v, (int, float)):
            return (v,)
        return v

    @field_validator("T")
    @classmethod
    def validate_T(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if not v or any(t < 3 for t in v):
            raise ValueError("sample lengths must be at least 3")
        return v

    @field_validator("pi")
    @classmethod
    def validate_pi(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v or any(not p > 0 for p in v):
            raise ValueError("pi values must be positive")
        return v

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v or any(not 0 < a < 1 for a in v):
            raise ValueError("alpha values must lie in (0, 1)")
        return v

    @field_validator("bandwidth", mode="before")
    @classmethod
    def validate_bandwidth(cls, v: Any) -> Any:
        if isinstance(v, str) and v.strip().lower() == "auto":
            return "auto"
        return v


# Per-command defaults applied beneath the config file and flags.
COMMAND_DEFAULTS: dict[Command, dict[str, Any]] = {
    Command.COVERAGE: {"dgp": ("fast-rates",), "learner": ("lasso",)},
    Command.POWER: {"dgp": ("garch11",), "learner": ("ols", "ridge", "ap"), "alpha": (0.10, 0.05, 0.01)},
    Command.MDH: {"learner": ("ridge",), "alpha": (0.05,)},
    Command.ER_HIST: {"dgp": ("decreasing-sparsity", "fast-rates"), "T": (1000, 2000), "pi": (1.0,), "learner": ("lasso",)},
    Command.DIAGNOSE_SCORE: {"dgp": ("fast-rates",), "pi": (0.25,), "learner": ("lasso",)},
}


def parse_config_file(path: Union[str, Path]) -> dict[str, Any]:
    """Read ``key = value`` lines into a nested dict; dotted keys nest.

    Blank lines and ``#`` comments are ignored. Values stay strings and are
    converted by :class:`RunConfig`.

    Raises:
        ConfigurationError: If the file is missing or a line is malformed
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file not found: {path}", config_field="config")

    values: dict[str, Any] = {}
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{number}: expected 'key = value', got '{raw.strip()}'", config_field="config")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigurationError(f"{path}:{number}: empty key", config_field="config")
        set_dotted(values, key, value.strip("\"'"))
    return values


def set_dotted(target: dict[str, Any], key: str, value: Any) -> None:
    """target['a']['b'] = value for key 'a.b'."""
    *parents, leaf = key.split(".")
    node = target
    for part in parents:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigurationError(f"key '{key}' conflicts with scalar '{part}'", config_field=key)
        node = child
    node[leaf] = value


def _merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def build_run_config(
    command: str,
    flags: dict[str, Any],
    settings: Settings,
    config_path: Optional[Union[str, Path]] = None
) -> RunConfig:
    """Layer settings, command defaults, the config file and flags (highest wins).

    Args:
        command: Sub-command name
        flags: Flag values keyed by (possibly dotted) config key; only flags given on the command line
        settings: Process settings supplying seed and output directory defaults
        config_path: Optional key=value file

    Raises:
        ConfigurationError: Naming the first offending key
    """
    try:
        cmd = Command(command)
    except ValueError as e:
        raise ConfigurationError(f"unknown command '{command}'", config_field="command") from e

    layered: dict[str, Any] = {
        "command": cmd.value,
        "output_dir": settings.output_dir,
        "master_seed": settings.master_seed,
    }
    layered = _merge(layered, COMMAND_DEFAULTS[cmd])
    if config_path is not None:
        from_file = parse_config_file(config_path)
        from_file.pop("command", None)
        layered = _merge(layered, from_file)
    nested_flags: dict[str, Any] = {}
    for key, value in flags.items():
        set_dotted(nested_flags, key, value)
    layered = _merge(layered, nested_flags)

    try:
        return RunConfig.model_validate(layered)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"] if not isinstance(part, int)) or "config"
        raise ConfigurationError(f"invalid value for '{key}': {first['msg']}", config_field=key) from e


def worker_count(config: RunConfig, settings: Settings) -> int:
    """Requested workers, capped by OOS_INFER_THREADS when set."""
    if settings.threads is None:
        return config.threads
    return min(config.threads, settings.threads)
