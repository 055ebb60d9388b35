"""Writing study tables and the run manifest."""

import json
import logging
from pathlib import Path
from typing import Any, Literal

import pandas as pd

from oos_infer import __version__

logger = logging.getLogger(__name__)

OutputFormat = Literal["csv", "json"]
MANIFEST_NAME = "manifest.json"


def write_frame(frame: pd.DataFrame, path: Path, fmt: OutputFormat = "csv") -> Path:
    """Write one table; the same frame always yields the same bytes."""
    if fmt == "csv":
        frame.to_csv(path, index=False, lineterminator="\n")
    else:
        path.write_text(frame.to_json(orient="records", indent=2, double_precision=15) + "\n", encoding="utf-8")
    return path


def write_frames(output_dir: Path, frames: dict[str, pd.DataFrame], fmt: OutputFormat = "csv") -> list[str]:
    """Write each named frame as ``<name>.<fmt>``; returns file names relative to ``output_dir``."""
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, frame in frames.items():
        path = write_frame(frame, output_dir / f"{name}.{fmt}", fmt)
        written.append(path.name)
        logger.info(f"Wrote {len(frame)} rows to {path}")
    return written


def write_manifest(
    output_dir: Path,
    command: str,
    files: list[str],
    master_seed: int,
    config: dict[str, Any],
    wall_time: float
) -> Path:
    """Record everything needed to rerun ``command`` and every file it wrote."""
    manifest = {
        "command": command,
        "version": f"oos-infer {__version__}",
        "master_seed": master_seed,
        "config": config,
        "files": sorted(files),
        "wall_time_seconds": round(wall_time, 3),
    }
    path = output_dir / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path
