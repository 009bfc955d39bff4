"""
CSV tables written through pandas in a fixed, byte-reproducible format:
header row, '.' decimal point, 17 significant digits, LF line endings.
"""

import os
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Union

import pandas as pd

FLOAT_FORMAT = "%.17g"


def to_frame(
    rows: Union[pd.DataFrame, Iterable[Dict[str, Any]]],
    columns: Optional[Sequence[str]] = None,
) -> pd.DataFrame:
    """
    Builds a DataFrame from records, keeping the requested column order.

    Args:
        rows: A DataFrame or an iterable of dictionaries.
        columns: Column order. Required when ``rows`` is empty.
    Returns:
        pd.DataFrame: The table.
    """
    if isinstance(rows, pd.DataFrame):
        frame = rows
    else:
        records = list(rows)
        if not records and columns is None:
            raise ValueError("columns are required to write an empty table")
        frame = pd.DataFrame.from_records(records, columns=columns)
    if columns is not None:
        frame = frame.loc[:, list(columns)]
    return frame


def write(
    file_path: os.PathLike,
    rows: Union[pd.DataFrame, Iterable[Dict[str, Any]]],
    columns: Optional[Sequence[str]] = None,
) -> None:
    """
    Writes a table as CSV.

    Args:
        file_path (os.PathLike): Destination path; parent directories are created.
        rows: A DataFrame or an iterable of dictionaries.
        columns: Column order. An empty ``rows`` writes only this header.
    """
    frame = to_frame(rows, columns)
    write_path = Path(file_path)
    write_path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(
        write_path,
        index=False,
        float_format=FLOAT_FORMAT,
        lineterminator="\n",
        encoding="utf-8",
    )


def dumps(
    rows: Union[pd.DataFrame, Iterable[Dict[str, Any]]],
    columns: Optional[Sequence[str]] = None,
) -> str:
    """Same format as :func:`write`, returned as a string (used for stdout)."""
    return to_frame(rows, columns).to_csv(
        index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
    )


def read(file_path: os.PathLike) -> pd.DataFrame:
    """
    Reads a CSV table written by :func:`write`.

    Args:
        file_path (os.PathLike): The path to the CSV file.
    Returns:
        pd.DataFrame: The table, floats parsed round-trip exact.
    """
    return pd.read_csv(file_path, float_precision="round_trip")
