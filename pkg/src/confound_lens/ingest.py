"""CSV ingestion: UTF-8, header row, "." decimal point, empty cell = missing.

A column is numeric when every non-missing cell parses as a float; any other
column is categorical and gets expanded into 0/1 indicators named
"column:level", one per non-reference level in sorted order.  The reference
level is the most frequent one (ties broken by sort order).  Rows with a
missing value in any column are dropped, with a counted warning.  Cells that
parse to non-finite floats (nan, inf) also count as missing.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from collections import Counter
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .errors import EmptyAfterFilteringError, ParseError

_MISSING = object()


def _read_rows(source) -> tuple[list[str], list[list[str]]]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return _read_rows(fh)
    try:
        reader = csv.reader(source)
        table = [row for row in reader if row]
    except (csv.Error, UnicodeDecodeError) as exc:
        raise ParseError(f"malformed CSV: {exc}") from exc
    if not table:
        raise ParseError("file has no header row")
    header = [h.strip() for h in table[0]]
    if any(not h for h in header):
        raise ParseError("header contains an empty column name", row=1)
    dupes = [h for h, c in Counter(header).items() if c > 1]
    if dupes:
        raise ParseError(f"duplicate column names: {dupes}", row=1)
    rows = []
    for i, row in enumerate(table[1:], start=2):
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, got {len(row)}", row=i)
        rows.append([cell.strip() for cell in row])
    return header, rows


def _parse_cell(cell: str):
    if cell == "":
        return _MISSING
    try:
        value = float(cell)
    except ValueError:
        return cell  # stays a string: categorical level
    if not math.isfinite(value):
        return _MISSING
    return value


def _build_dataset(header: list[str], rows: list[list[str]],
                   source_name: str) -> Dataset:
    ncol = len(header)
    parsed = [[_parse_cell(row[j]) for row in rows] for j in range(ncol)]
    numeric = [all(not isinstance(v, str) for v in col) for col in parsed]

    # string cells in a categorical column are levels; empty stays missing
    keep = []
    for i in range(len(rows)):
        if all(parsed[j][i] is not _MISSING for j in range(ncol)):
            keep.append(i)
    dropped = len(rows) - len(keep)
    if dropped:
        warnings.warn(
            f"{source_name}: dropped {dropped} row(s) with missing values",
            stacklevel=2)
    if not keep:
        raise EmptyAfterFilteringError(
            f"{source_name}: no complete rows remain after dropping missing values")

    names: list[str] = []
    columns: list[np.ndarray] = []
    for j, col_name in enumerate(header):
        col = [parsed[j][i] for i in keep]
        if numeric[j]:
            names.append(col_name)
            columns.append(np.array(col, dtype=np.float64))
            continue
        levels = [str(v) for v in col]
        counts = Counter(levels)
        # reference = most frequent level, ties broken lexicographically
        reference = min(counts, key=lambda lv: (-counts[lv], lv))
        for level in sorted(counts):
            if level == reference:
                continue
            names.append(f"{col_name}:{level}")
            columns.append(np.array([1.0 if v == level else 0.0 for v in levels]))

    if not names:
        raise ParseError(f"{source_name}: no usable columns")
    try:
        return Dataset(tuple(names), np.column_stack(columns))
    except ValueError as exc:
        raise ParseError(f"{source_name}: {exc}") from exc


def ingest_csv(source) -> Dataset:
    """Read a CSV file (path or open text stream) into a Dataset."""
    name = str(source) if isinstance(source, (str, Path)) else "<stream>"
    header, rows = _read_rows(source)
    return _build_dataset(header, rows, name)


def ingest_csv_stratified(source, stratify: str) -> list[tuple[str, Dataset]]:
    """Split rows by the raw value of one column, then ingest each stratum.

    The stratify column itself is removed from the per-stratum datasets;
    rows with a missing stratum value are dropped up front.  Indicator
    expansion happens independently within each stratum.
    """
    name = str(source) if isinstance(source, (str, Path)) else "<stream>"
    header, rows = _read_rows(source)
    if stratify not in header:
        raise KeyError(f"no column {stratify!r}; available: {', '.join(header)}")
    j = header.index(stratify)
    sub_header = header[:j] + header[j + 1:]

    groups: dict[str, list[list[str]]] = {}
    missing = 0
    for row in rows:
        label = row[j].strip()
        if label == "":
            missing += 1
            continue
        groups.setdefault(label, []).append(row[:j] + row[j + 1:])
    if missing:
        warnings.warn(f"{name}: dropped {missing} row(s) with a missing "
                      f"{stratify!r} value", stacklevel=2)
    if not groups:
        raise EmptyAfterFilteringError(f"{name}: every row is missing {stratify!r}")
    return [(label, _build_dataset(sub_header, groups[label], f"{name}[{stratify}={label}]"))
            for label in sorted(groups)]


def dataset_to_csv(data: Dataset, stream: io.TextIOBase) -> None:
    """Write a Dataset back out as CSV with full-precision floats."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(data.names)
    for i in range(data.n):
        writer.writerow([repr(float(v)) for v in data.values[i]])
