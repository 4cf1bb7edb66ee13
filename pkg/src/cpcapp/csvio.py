"""Numeric CSV ingestion and emission.

Files are sample-major (one row per sample); the in-memory convention is
feature-major, so reading transposes. A single non-numeric first row is
treated as a header. All output uses 17 significant digits, which
round-trips doubles exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .stats import DataMatrix


@dataclass(frozen=True, eq=False)
class CsvTable:
    """A parsed file: optional column names plus sample-major rows."""

    header: list[str] | None
    rows: np.ndarray  # (n_samples, n_columns) float64


def _parse_line(line: str, lineno: int, path: str) -> list[float] | None:
    cells = [cell.strip() for cell in line.split(",")]
    try:
        return [float(cell) for cell in cells]
    except ValueError:
        if lineno == 1:
            return None  # header row
        raise ParseError(f"{path}:{lineno}: non-numeric cell in data row")


def read_csv_table(path) -> CsvTable:
    """Parse a rectangular numeric CSV, keeping any header names."""
    path = str(path)
    header = None
    rows: list[list[float]] = []
    width = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parsed = _parse_line(line, lineno, path)
            if parsed is None:
                header = [cell.strip() for cell in line.split(",")]
                continue
            if width is None:
                width = len(parsed)
            elif len(parsed) != width:
                raise ParseError(
                    f"{path}:{lineno}: row has {len(parsed)} cells, expected {width}"
                )
            rows.append(parsed)
    if not rows:
        raise ParseError(f"{path}: no numeric rows found")
    table = np.array(rows, dtype=float)
    if not np.all(np.isfinite(table)):
        raise ParseError(f"{path}: file contains non-finite values")
    if header is not None and len(header) != table.shape[1]:
        raise ParseError(f"{path}: header has {len(header)} names for {table.shape[1]} columns")
    return CsvTable(header=header, rows=table)


def read_csv(path, transpose: bool = False) -> DataMatrix:
    """Load a rectangular numeric CSV as an uncentered sample matrix.

    Rows are samples and columns features unless ``transpose`` is set, in
    which case rows are read as features directly.
    """
    table = read_csv_table(path)
    values = table.rows if transpose else table.rows.T
    return DataMatrix(values=values)


def write_csv(path, values, header=None) -> None:
    """Write a feature-major array sample-major with 17 significant digits."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ParseError(f"can only write 2-D tables, got shape {values.shape}")
    with open(path, "w", encoding="ascii") as fh:
        if header is not None:
            fh.write(",".join(header) + "\n")
        for row in values.T:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
