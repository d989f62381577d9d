import logging
import os
import re
from typing import Tuple

import numpy as np
import pandas as pd

from slpca.models.data_matrix import CenteringInfo, DataMatrix, default_column_names
from slpca.utils.errors import DataFormatError, ParameterRangeError, ZeroVarianceError

logger = logging.getLogger(__name__)

SUPPORTED_DELIMITERS = (",", ";", "\t")

# pandas tokenizer message for a row longer than the first one
TOO_MANY_FIELDS = re.compile(r"Expected (\d+) fields in line (\d+), saw (\d+)")


def _is_missing(cell) -> bool:
    return cell is None or (isinstance(cell, float) and np.isnan(cell)) or str(cell).strip() == ""


def load_csv(path: str, has_header: bool = False, delimiter: str = ",") -> DataMatrix:
    """Read a numeric CSV file into a DataMatrix"""
    if delimiter not in SUPPORTED_DELIMITERS:
        raise ParameterRangeError(f"Unsupported delimiter {delimiter!r}")
    if not os.path.exists(path):
        raise DataFormatError(f"File not found: {path}")

    # the header is read as a plain row so pandas never renames duplicate names
    try:
        frame = pd.read_csv(
            path,
            sep=delimiter,
            header=None,
            dtype=str,
            na_filter=False,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        raise DataFormatError(f"Empty file: {path}")
    except pd.errors.ParserError as e:
        match = TOO_MANY_FIELDS.search(str(e))
        if match:
            expected, line = int(match.group(1)), int(match.group(2))
            raise DataFormatError(
                f"Ragged row: expected {expected} fields, got {match.group(3)}",
                row=line,
                column=expected + 1,
            )
        raise DataFormatError(f"Ragged rows in {path}: {e}")

    raw = frame.to_numpy(dtype=object)
    header = None
    if has_header:
        header = [str(name).strip() for name in raw[0]]
        raw = raw[1:]
        seen = set()
        for j, name in enumerate(header):
            if name in seen:
                raise DataFormatError(f"Duplicate column name {name!r}", row=1, column=j + 1)
            seen.add(name)

    if raw.shape[0] == 0:
        raise DataFormatError(f"No data rows in {path}")

    # file line of the first data row
    first_line = 2 if has_header else 1
    values = np.empty(raw.shape, dtype=float)
    for i, row in enumerate(raw):
        missing = [_is_missing(cell) for cell in row]
        if any(missing):
            first_gap = missing.index(True)
            if all(missing[first_gap:]):
                raise DataFormatError(
                    f"Ragged row: expected {raw.shape[1]} fields, got {first_gap}",
                    row=i + first_line,
                )
            raise DataFormatError("Empty cell", row=i + first_line, column=first_gap + 1)
        for j, cell in enumerate(row):
            try:
                values[i, j] = float(str(cell).strip())
            except ValueError:
                raise DataFormatError(
                    f"Cannot parse {cell!r} as a number", row=i + first_line, column=j + 1
                )
            if not np.isfinite(values[i, j]):
                raise DataFormatError(
                    f"Non-finite value {cell!r}", row=i + first_line, column=j + 1
                )

    if header is not None:
        column_names = header
    else:
        column_names = default_column_names(values.shape[1])

    data = DataMatrix(values=values, column_names=column_names)
    logger.info(f"Loaded {data.n} x {data.p} matrix from {path}")
    return data


def write_csv(data: DataMatrix, path: str, delimiter: str = ",", float_format: str = "%.17g"):
    """Write a DataMatrix as CSV with a header row"""
    frame = pd.DataFrame(np.asarray(data.values), columns=data.column_names)
    frame.to_csv(path, sep=delimiter, index=False, float_format=float_format)
    logger.info(f"Wrote {data.n} x {data.p} matrix to {path}")


def center_standardize(data: DataMatrix, standardize: bool = False) -> Tuple[DataMatrix, CenteringInfo]:
    """Center the columns and optionally divide them by their standard deviation"""
    values = data.values
    means = values.mean(axis=0)
    if standardize:
        if data.n < 2:
            raise ParameterRangeError("Standardization needs at least 2 rows")
        scales = values.std(axis=0)
        for name, scale, mean in zip(data.column_names, scales, means):
            if scale <= 1e-12 * max(1.0, abs(mean)):
                raise ZeroVarianceError(name)
    else:
        scales = np.ones(data.p)

    info = CenteringInfo(means=means, scales=scales, standardized=standardize)
    centered = DataMatrix(values=info.apply(values), column_names=data.column_names)
    logger.debug(f"Centered {data.n} x {data.p} matrix (standardize={standardize})")
    return centered, info


def invert_centering(data: DataMatrix, info: CenteringInfo) -> DataMatrix:
    """Undo center_standardize"""
    return DataMatrix(values=info.invert(data.values), column_names=data.column_names)


def total_covariance(data: DataMatrix) -> np.ndarray:
    """Total variance matrix V with denominator n"""
    if data.n < 2:
        raise ParameterRangeError("Covariance needs at least 2 rows")
    centered = data.values - data.values.mean(axis=0)
    V = centered.T @ centered / data.n
    return (V + V.T) / 2
