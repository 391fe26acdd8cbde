"""CSV ingest/export for data matrices (RFC 4180 style, UTF-8, '.' decimal)."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class CSVFormatError(ValueError):
    """Malformed input file; the message names the path and line."""


@dataclass
class IngestedData:
    X: np.ndarray
    labels: np.ndarray | None
    columns: list
    path: str

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def ingest_csv(path, header: bool | None = None, label_column=None) -> IngestedData:
    """Read a rectangular numeric CSV.

    ``header=None`` sniffs: the first row is a header if any cell is non-numeric.
    ``label_column`` (name or 0-based index) is split off as ground-truth labels.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if row and any(c.strip() for c in row)]
    except OSError as exc:
        raise CSVFormatError(f"{path}: cannot read file ({exc.strerror})") from exc
    if not rows:
        raise CSVFormatError(f"{path}: file is empty")

    first = [c.strip() for c in rows[0][1]]
    if header is None:
        header = not all(_is_number(c) for c in first)
    if header:
        columns = first
        rows = rows[1:]
    else:
        columns = [f"x{j + 1}" for j in range(len(first))]
    if not rows:
        raise CSVFormatError(f"{path}: no data rows")

    width = len(columns)
    label_idx = None
    if label_column is not None:
        if isinstance(label_column, int) or (isinstance(label_column, str) and label_column.isdigit()
                                             and label_column not in columns):
            label_idx = int(label_column)
        elif label_column in columns:
            label_idx = columns.index(label_column)
        else:
            raise CSVFormatError(f"{path}: no column named {label_column!r} (columns: {columns})")
        if not 0 <= label_idx < width:
            raise CSVFormatError(f"{path}: label column index {label_idx} out of range for {width} columns")

    values, labels = [], []
    for line, row in rows:
        if len(row) != width:
            raise CSVFormatError(f"{path}: line {line} has {len(row)} fields, expected {width} (ragged row)")
        rec = []
        for j, cell in enumerate(row):
            cell = cell.strip()
            if j == label_idx:
                labels.append(cell)
                continue
            try:
                v = float(cell)
            except ValueError:
                raise CSVFormatError(
                    f"{path}: line {line}, column {j + 1} ({columns[j]!r}): non-numeric value {cell!r}"
                ) from None
            if not math.isfinite(v):
                raise CSVFormatError(f"{path}: line {line}, column {j + 1}: non-finite value {cell!r}")
            rec.append(v)
        values.append(rec)

    X = np.array(values, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] == 0:
        raise CSVFormatError(f"{path}: no numeric feature columns")
    lab = None
    if label_idx is not None:
        _, lab = np.unique(np.array(labels), return_inverse=True)
        lab = lab + 1
        columns = [c for j, c in enumerate(columns) if j != label_idx]
    return IngestedData(X, lab, columns, str(path))


def write_csv(path, X, labels=None, label_name: str = "class", columns=None) -> None:
    """Write X (and optionally a trailing label column) with a header row; floats use repr round-tripping."""
    X = np.asarray(X, dtype=np.float64)
    columns = list(columns) if columns is not None else [f"x{j + 1}" for j in range(X.shape[1])]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns + ([label_name] if labels is not None else []))
        for i, row in enumerate(X):
            cells = [repr(float(v)) for v in row]
            if labels is not None:
                cells.append(str(labels[i]))
            w.writerow(cells)
