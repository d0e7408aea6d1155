"""
Sample file ingestion and emission.

Text samples hold one decimal float per line (UTF-8); blank lines and lines
starting with ``#`` are ignored. CSV samples skip the same lines and are
read with pandas and a designated column.
"""
import io
import logging
import math
import os
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import DataError
from .models import Sample

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _parse_text(lines: Iterable[str]) -> Sample:
    values = []
    for line_number, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith('#'):
            continue
        try:
            value = float(text)
        except ValueError:
            raise DataError(f"not a decimal number: {text!r}", line_number=line_number) from None
        if not math.isfinite(value):
            raise DataError(f"non-finite value: {text!r}", line_number=line_number)
        values.append(value)
    if not values:
        raise DataError("sample file contains no values")
    return Sample(np.asarray(values, dtype=float))


def _csv_records(path: str) -> Tuple[str, List[int]]:
    """The CSV text without blank and comment lines, and the file line number of each kept line."""
    with open(path, 'r', encoding='utf-8') as csv_file:
        kept = [(number, raw if raw.endswith('\n') else raw + '\n')
                for number, raw in enumerate(csv_file, start=1) if raw.split('#', 1)[0].strip()]
    return "".join(raw for _, raw in kept), [number for number, _ in kept]


def _parse_csv(path: str, column: Union[str, int]) -> Sample:
    try:
        text, line_numbers = _csv_records(path)
        frame = pd.read_csv(io.StringIO(text), comment='#', dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"cannot parse CSV {path}: {e}") from e

    if isinstance(column, str) and column in frame.columns:
        series = frame[column]
    else:
        try:
            series = frame.iloc[:, int(column)]
        except (ValueError, IndexError):
            raise DataError(f"column {column!r} not found in {path}") from None

    values = []
    for position, text in enumerate(series.str.strip()):
        try:
            value = float(text)
        except ValueError:
            value = math.nan
        if not math.isfinite(value):
            # the header takes the first kept line
            line_number = line_numbers[position + 1] if position + 1 < len(line_numbers) else None
            raise DataError(f"not a finite decimal number: {text!r}", line_number=line_number)
        values.append(value)
    if not values:
        raise DataError("sample file contains no values")
    return Sample(np.asarray(values, dtype=float))


def read_sample(path: str, column: Optional[Union[str, int]] = None) -> Sample:
    """
    Read a sample from a text or CSV file.

    Args:
        path: File path
        column: CSV column name or zero-based index; when given the file is read as CSV

    Returns:
        A Sample

    Raises:
        DataError: If the file is missing, unreadable or malformed
    """
    if not os.path.exists(path):
        raise DataError(f"sample file not found: {path}")
    if column is None and path.lower().endswith('.csv'):
        column = 0
    if column is not None:
        sample = _parse_csv(path, column)
    else:
        try:
            with open(path, 'r', encoding='utf-8') as sample_file:
                sample = _parse_text(sample_file)
        except UnicodeDecodeError as e:
            raise DataError(f"sample file is not UTF-8: {e}") from e
    logger.info(f"Read {sample.n} observations from {path}")
    return sample


def format_value(value: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return FLOAT_FORMAT % value


def write_sample(path: str, sample: Sample, header: Optional[str] = None) -> str:
    """
    Write a sample as one float per line.

    Args:
        path: Destination file
        sample: The sample
        header: Optional comment written on the first line

    Returns:
        The path written
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as sample_file:
        if header:
            sample_file.write(f"# {header}\n")
        for value in sample.values:
            sample_file.write(format_value(float(value)) + "\n")
    logger.info(f"Wrote {sample.n} observations to {path}")
    return path
