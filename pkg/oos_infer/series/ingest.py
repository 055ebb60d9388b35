"""CSV ingestion of empirical price series."""

import logging
from enum import Enum
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from oos_infer.core.exceptions import ConfigurationError, DataParseError
from oos_infer.series.models import Series

logger = logging.getLogger(__name__)


class Transform(str, Enum):
    """Transformation applied to the raw price column."""

    INCREMENTS = "increments"
    LOG_RETURNS = "log_returns"
    NONE = "none"


def _resolve_column(frame: pd.DataFrame, column: Union[str, int]) -> str:
    if isinstance(column, int) or (isinstance(column, str) and column.isdigit() and column not in frame.columns):
        index = int(column)
        if not 0 <= index < len(frame.columns):
            raise ConfigurationError(f"column index {index} out of range", config_field="column")
        return str(frame.columns[index])
    if column not in frame.columns:
        raise ConfigurationError(
            f"column '{column}' not found; available: {', '.join(map(str, frame.columns))}",
            config_field="column"
        )
    return column


def ingest_csv(
    path: Union[str, Path],
    column: Union[str, int],
    transform: Union[Transform, str] = Transform.INCREMENTS,
    frequency: str = "daily"
) -> Series:
    """Read one numeric price column from a CSV file and transform it.

    The file is comma-separated with a header row. The first column is taken
    as the date column; it is kept in metadata only.

    Args:
        path: CSV file path
        column: Price column name or zero-based index
        transform: ``increments`` (p_t - p_{t-1}), ``log_returns`` or ``none``
        frequency: Frequency label stored on the series

    Returns:
        Series of length n - 1 for differencing transforms, n otherwise

    Raises:
        ConfigurationError: If the file or column does not exist
        DataParseError: If the file has no data rows or a cell is not numeric
    """
    path = Path(path)
    transform = Transform(transform)
    if not path.is_file():
        raise ConfigurationError(f"input file not found: {path}", config_field="input")

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise DataParseError(f"cannot parse {path}: {e}") from e

    name = _resolve_column(frame, column)
    if frame.empty:
        raise DataParseError(f"{path} has a header but no data rows", column=name)

    raw = frame[name].str.strip()
    prices = pd.to_numeric(raw, errors="coerce")
    bad = np.flatnonzero(prices.isna().to_numpy() | ~np.isfinite(prices.to_numpy(dtype=float, na_value=np.nan)))
    if bad.size:
        row = int(bad[0])
        raise DataParseError(
            f"non-numeric value '{raw.iloc[row]}' in column '{name}' at row {row}",
            row=row,
            column=name
        )
    values = prices.to_numpy(dtype=float)

    if transform is Transform.INCREMENTS:
        values = np.diff(values)
    elif transform is Transform.LOG_RETURNS:
        non_positive = np.flatnonzero(values <= 0)
        if non_positive.size:
            row = int(non_positive[0])
            raise DataParseError(
                f"log_returns needs positive prices; row {row} of '{name}' is {values[row]}",
                row=row,
                column=name
            )
        values = np.diff(np.log(values))

    if values.size < 2:
        raise DataParseError(f"column '{name}' yields fewer than 2 observations", column=name)
    if np.ptp(values) == 0:
        logger.warning(f"Series '{name}' is constant after {transform.value} transform")

    date_column = str(frame.columns[0])
    metadata = {
        "source": str(path),
        "column": name,
        "transform": transform.value,
        "date_column": date_column,
        "first_date": frame[date_column].iloc[0],
        "last_date": frame[date_column].iloc[-1],
    }
    logger.info(f"Ingested {values.size} observations of '{name}' from {path}")
    return Series(values=values, name=name, frequency=frequency, metadata=metadata)
