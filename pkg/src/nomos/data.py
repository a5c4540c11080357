"""CSV ingestion into input sources.

Three layouts are recognized by their header:

* game-state pools: exactly the columns terrain, lander_x, lander_vy, fuel;
* grids: cell columns named p<row>_<col> plus a label column;
* tabular rows: feature columns, optionally annotated as ``name:kind`` with
  kind one of int/float/str (unannotated columns default to float), plus a
  label column.

The label column is named by ``label_col`` (default: a column literally
called "label", when present). Label values must parse as ints.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import SchemaError
from .records import GameState, Grid, Record, Schema, Tabular

_GAMESTATE_COLUMNS = ("terrain", "lander_x", "lander_vy", "fuel")
_GRID_CELL = re.compile(r"^p(\d+)_(\d+)$")


@dataclass(frozen=True)
class DataSource:
    name: str
    rows: tuple[Record, ...]
    # static shape for the checker: ("tabular", Schema) | ("grid", (h, w)) | ("gamestate",)
    shape: tuple

    def __len__(self) -> int:
        return len(self.rows)


def _parse_int(text: str, column: str, row: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise SchemaError(f"column {column!r}: {text!r} is not an int", row=row) from None


def _parse_float(text: str, column: str, row: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise SchemaError(f"column {column!r}: {text!r} is not a float", row=row) from None


def load_dataset(path: str | Path, label_col: str | None = None,
                 name: str | None = None) -> DataSource:
    """Load a CSV file into a DataSource; raises SchemaError on malformed data."""
    path = Path(path)
    source_name = name or path.stem
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty dataset: missing header row") from None
        header = [col.strip() for col in header]
        rows = [[cell.strip() for cell in line] for line in reader if line]

    if not rows:
        raise SchemaError("empty dataset")

    if tuple(header) == _GAMESTATE_COLUMNS:
        return _load_gamestates(source_name, header, rows)

    if label_col is None and "label" in header:
        label_col = "label"

    cell_columns = [col for col in header if col != label_col]
    if cell_columns and all(_GRID_CELL.match(col) for col in cell_columns):
        return _load_grids(source_name, header, rows, label_col)
    return _load_tabular(source_name, header, rows, label_col)


def _load_gamestates(name: str, header: list[str], rows: list[list[str]]) -> DataSource:
    records = []
    for number, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise SchemaError(f"expected {len(header)} columns, got {len(row)}", row=number)
        values = [_parse_int(cell, col, number) for col, cell in zip(header, row)]
        records.append(GameState(*values))
    return DataSource(name, tuple(records), ("gamestate",))


def _load_grids(name: str, header: list[str], rows: list[list[str]],
                label_col: str | None) -> DataSource:
    positions: dict[str, tuple[int, int]] = {}
    height = width = 0
    for col in header:
        if col == label_col:
            continue
        match = _GRID_CELL.match(col)
        r, c = int(match.group(1)), int(match.group(2))
        positions[col] = (r, c)
        height = max(height, r + 1)
        width = max(width, c + 1)
    if len(positions) != height * width:
        raise SchemaError(f"grid columns cover {len(positions)} cells, "
                          f"expected {height}x{width} = {height * width}")

    records = []
    for number, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise SchemaError(f"expected {len(header)} columns, got {len(row)}", row=number)
        cells = [0.0] * (height * width)
        label = None
        for col, cell in zip(header, row):
            if col == label_col:
                label = _parse_int(cell, col, number)
                continue
            value = _parse_float(cell, col, number)
            if not 0.0 <= value <= 1.0:
                raise SchemaError(f"column {col!r}: cell value {value} outside [0, 1]",
                                  row=number)
            r, c = positions[col]
            cells[r * width + c] = value
        records.append(Grid(height=height, width=width, cells=tuple(cells), label=label))
    return DataSource(name, tuple(records), ("grid", (height, width)))


def _load_tabular(name: str, header: list[str], rows: list[list[str]],
                  label_col: str | None) -> DataSource:
    schema_entries: list[tuple[str, str]] = []
    feature_columns: list[int] = []
    label_index: int | None = None
    for idx, col in enumerate(header):
        if col == label_col:
            label_index = idx
            continue
        if ":" in col:
            feat_name, _, kind = col.partition(":")
            if kind not in ("int", "float", "str"):
                raise SchemaError(f"column {col!r}: unknown kind {kind!r}")
        else:
            feat_name, kind = col, "float"
        schema_entries.append((feat_name, kind))
        feature_columns.append(idx)
    if label_col is not None and label_index is None:
        raise SchemaError(f"label column {label_col!r} not found in header")
    if not schema_entries:
        raise SchemaError("no feature columns")

    schema: Schema = tuple(schema_entries)
    records = []
    for number, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise SchemaError(f"expected {len(header)} columns, got {len(row)}", row=number)
        values = []
        for (feat_name, kind), idx in zip(schema, feature_columns):
            cell = row[idx]
            if kind == "int":
                values.append(_parse_int(cell, feat_name, number))
            elif kind == "float":
                values.append(_parse_float(cell, feat_name, number))
            else:
                values.append(cell)
        label = None
        if label_index is not None:
            label = _parse_int(row[label_index], header[label_index], number)
        records.append(Tabular(schema=schema, values=tuple(values), label=label))
    return DataSource(name, tuple(records), ("tabular", schema))
