"""Command-line entry point for oos-infer."""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, NoReturn, Optional, Sequence

from pydantic import ValidationError as PydanticValidationError

from oos_infer import __version__
from oos_infer.cli.commands import HANDLERS
from oos_infer.cli.runconfig import Command, build_run_config, worker_count
from oos_infer.core.config import Settings, get_settings
from oos_infer.core.exceptions import ConfigurationError, OosInferError
from oos_infer.lab.output import write_frames, write_manifest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", dest="config_file", help="key=value configuration file")
    parser.add_argument("--output-dir", dest="output_dir", help="Directory for tables and manifest")
    parser.add_argument("--seed", dest="master_seed", help="Master seed")
    parser.add_argument("--format", dest="format", choices=["csv", "json"], help="Table format")
    parser.add_argument("--threads", dest="threads", help="Replication workers")


def _add_simulation(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dgp", help="Comma-separated data-generating processes")
    parser.add_argument("--T", dest="T", help="Comma-separated sample lengths")
    parser.add_argument("--pi", help="Comma-separated out-of-sample to in-sample ratios")
    parser.add_argument("--alpha", help="Comma-separated levels")
    parser.add_argument("--reps", help="Replications per cell")
    parser.add_argument("--n-features", dest="n_features", help="Regressors of the linear designs (default T)")


def _add_learner(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--learner", help="ols, ridge, lasso or dnn")
    parser.add_argument("--lambda", dest="lambda", help="Fixed penalty")
    parser.add_argument("--lambda-rule", dest="lambda_rule", help="sqrt_logp_over_R or scaled")
    parser.add_argument("--lambda-c", dest="lambda_c", help="Constant of the scaled rule")
    parser.add_argument("--cv-k", dest="cv.k", help="Blocks of the ridge cross-validation")
    parser.add_argument("--dnn-depth", dest="dnn.depth", help="Hidden layers")
    parser.add_argument("--dnn-width", dest="dnn.width", help="Units per hidden layer")
    parser.add_argument("--dnn-lr", dest="dnn.lr", help="Learning rate")
    parser.add_argument("--dnn-epochs", dest="dnn.epochs", help="Training epochs")
    parser.add_argument("--dnn-seed", dest="dnn.seed", help="Training seed")


def _add_features(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lags", help="Number of lags")
    parser.add_argument("--no-interactions", dest="interactions", action="store_const", const=False,
                        help="Drop pairwise lag products")
    parser.add_argument("--powers", help="Comma-separated powers of the lags, subset of 2,3,4")
    parser.add_argument("--standardize", action="store_const", const=True, help="Standardize on training rows")
    parser.add_argument("--cv-k", dest="cv.k", help="Blocks of the ridge cross-validation")


def build_parser() -> argparse.ArgumentParser:
    """Parser with one sub-command per study; unset flags are absent from the namespace."""
    parser = UsageParser(
        prog="oos-infer",
        description="Out-of-sample predictive inference: interval coverage, MDH tests and Monte Carlo studies",
        argument_default=argparse.SUPPRESS
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=UsageParser)

    coverage = commands.add_parser("coverage", help="Interval coverage of the true risk", argument_default=argparse.SUPPRESS)
    _add_shared(coverage)
    _add_simulation(coverage)
    _add_learner(coverage)
    coverage.add_argument("--bandwidth", help="HAC bandwidth: auto or an integer")

    power = commands.add_parser("power", help="Size and power of the MDH tests", argument_default=argparse.SUPPRESS)
    _add_shared(power)
    _add_simulation(power)
    _add_features(power)
    power.add_argument("--learner", help="Comma-separated methods: ols, ridge, ap")

    mdh = commands.add_parser("mdh", help="MDH tests on an empirical price file", argument_default=argparse.SUPPRESS)
    _add_shared(mdh)
    _add_features(mdh)
    mdh.add_argument("--input", help="CSV file with a header row")
    mdh.add_argument("--column", help="Comma-separated price columns (names or indices)")
    mdh.add_argument("--transform", help="increments, log_returns or none")
    mdh.add_argument("--pi", help="Comma-separated out-of-sample to in-sample ratios")
    mdh.add_argument("--alpha", help="Test level")
    mdh.add_argument("--learner", help="Comma-separated methods: ols, ridge, ap")

    er_hist = commands.add_parser("er-hist", help="Per-replication Delta and ER samples",
                                  argument_default=argparse.SUPPRESS)
    _add_shared(er_hist)
    _add_simulation(er_hist)
    _add_learner(er_hist)

    score = commands.add_parser("diagnose-score", help="Zero-mean score diagnostic across replications",
                                argument_default=argparse.SUPPRESS)
    _add_shared(score)
    _add_simulation(score)
    _add_learner(score)
    score.add_argument("--loss", help="Loss name, e.g. mspe, mad, huber")
    score.add_argument("--delta", help="Huber kink")
    score.add_argument("--threshold", help="Flag level of the studentized score mean")
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr
    )


def _load_settings() -> Settings:
    try:
        return get_settings()
    except PydanticValidationError as e:
        first = e.errors()[0]
        key = "OOS_INFER_" + str(first["loc"][0]).upper()
        raise ConfigurationError(f"invalid environment variable {key}: {first['msg']}", config_field=key) from e


def execute(args: dict[str, Any], settings: Settings) -> int:
    command = args.pop("command")
    config_file = args.pop("config_file", None)
    config = build_run_config(command, args, settings, config_path=config_file)
    workers = worker_count(config, settings)

    output_dir = Path(config.output_dir)
    logger.info(f"Running {command} with master seed {config.master_seed} on {workers} worker(s)")
    start = time.perf_counter()
    frames = HANDLERS[Command(command)](config, workers)
    files = write_frames(output_dir, frames, config.format)
    manifest = write_manifest(
        output_dir,
        command=command,
        files=files,
        master_seed=config.master_seed,
        config=config.model_dump(mode="json", by_alias=True),
        wall_time=time.perf_counter() - start
    )

    if command == Command.MDH.value:
        sys.stdout.write(frames["mdh"].to_csv(index=False, lineterminator="\n"))
    for name in files:
        print(output_dir / name)
    print(manifest)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run one sub-command.

    Returns:
        0 on success, 1 on usage or configuration errors, 2 on data or numeric errors
    """
    parser = build_parser()
    try:
        namespace = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    try:
        settings = _load_settings()
    except OosInferError as e:
        print(f"oos-infer: error: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging(settings.log_level)

    try:
        return execute(vars(namespace), settings)
    except OosInferError as e:
        logger.debug(f"{type(e).__name__}: {e.to_dict()}")
        print(f"oos-infer: error: {e.message}", file=sys.stderr)
        return e.exit_code
    except PydanticValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or "config"
        print(f"oos-infer: error: invalid value for '{key}': {first['msg']}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())
