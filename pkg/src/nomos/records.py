"""Record values: tabular rows, grids, and game states.

Records are immutable; transforms build new ones. Equality is featurewise
and ignores the provenance label.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Union

from .errors import KindError

FEATURE_KINDS = ("int", "float", "str")

# (name, kind) pairs; kind is one of FEATURE_KINDS
Schema = tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class Tabular:
    schema: Schema
    values: tuple[Union[int, float, str], ...]
    label: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if len(self.values) != len(self.schema):
            raise KindError(
                f"row has {len(self.values)} values for a {len(self.schema)}-feature schema"
            )


@dataclass(frozen=True)
class Grid:
    height: int
    width: int
    cells: tuple[float, ...]
    label: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if len(self.cells) != self.height * self.width:
            raise KindError(
                f"grid has {len(self.cells)} cells for shape {self.height}x{self.width}"
            )

    def at(self, row: int, col: int) -> float:
        return self.cells[row * self.width + col]


@dataclass(frozen=True)
class GameState:
    terrain: int
    lander_x: int
    lander_vy: int
    fuel: int


Record = Union[Tabular, Grid, GameState]


def is_record(value: object) -> bool:
    return isinstance(value, (Tabular, Grid, GameState))


def provenance(record: Record) -> int | None:
    """The dataset label the record was drawn with, if it still carries one."""
    if isinstance(record, (Tabular, Grid)):
        return record.label
    return None


def drop_provenance(record: Record) -> Record:
    if isinstance(record, (Tabular, Grid)) and record.label is not None:
        return replace(record, label=None)
    return record


def flatten_numeric(record: Record) -> list[float]:
    """Flatten a record into a float vector for network input."""
    if isinstance(record, Grid):
        return list(record.cells)
    if isinstance(record, Tabular):
        out: list[float] = []
        for (name, _), value in zip(record.schema, record.values):
            if isinstance(value, str):
                raise KindError(f"feature {name!r} is a string; cannot feed it to a network")
            out.append(float(value))
        return out
    if isinstance(record, GameState):
        return [float(record.terrain), float(record.lander_x),
                float(record.lander_vy), float(record.fuel)]
    raise KindError(f"not a record: {record!r}")


# ── JSON serialization ───────────────────────────────────────────


def record_to_json(record: Record) -> dict:
    """Full serialization used in bug logs (schema and label included)."""
    if isinstance(record, Tabular):
        return {
            "kind": "tabular",
            "schema": [[name, kind] for name, kind in record.schema],
            "values": list(record.values),
            "label": record.label,
        }
    if isinstance(record, Grid):
        return {
            "kind": "grid",
            "height": record.height,
            "width": record.width,
            "cells": list(record.cells),
            "label": record.label,
        }
    if isinstance(record, GameState):
        return {
            "kind": "gamestate",
            "terrain": record.terrain,
            "lander_x": record.lander_x,
            "lander_vy": record.lander_vy,
            "fuel": record.fuel,
        }
    raise KindError(f"not a record: {record!r}")


def record_to_wire(record: Record) -> dict:
    """Minimal serialization sent over the child-process protocol."""
    if isinstance(record, Tabular):
        return {"kind": "tabular", "values": list(record.values)}
    if isinstance(record, Grid):
        return {"kind": "grid", "height": record.height, "width": record.width,
                "cells": list(record.cells)}
    if isinstance(record, GameState):
        return {"kind": "gamestate", "terrain": record.terrain, "lander_x": record.lander_x,
                "lander_vy": record.lander_vy, "fuel": record.fuel}
    raise KindError(f"not a record: {record!r}")


def record_from_json(data: dict) -> Record:
    kind = data.get("kind")
    if kind == "tabular":
        schema = tuple((name, k) for name, k in data.get("schema", []))
        values = []
        for i, value in enumerate(data["values"]):
            if i < len(schema) and schema[i][1] == "float" and isinstance(value, int):
                value = float(value)
            values.append(value)
        if not schema:
            schema = tuple((f"f{i}", "float" if isinstance(v, float) else
                            "str" if isinstance(v, str) else "int")
                           for i, v in enumerate(values))
        return Tabular(schema=schema, values=tuple(values), label=data.get("label"))
    if kind == "grid":
        return Grid(height=data["height"], width=data["width"],
                    cells=tuple(float(c) for c in data["cells"]), label=data.get("label"))
    if kind == "gamestate":
        return GameState(terrain=data["terrain"], lander_x=data["lander_x"],
                         lander_vy=data["lander_vy"], fuel=data["fuel"])
    raise KindError(f"unknown record kind {kind!r}")


def value_to_json(value: object) -> object:
    """Serialize a runtime scalar or record for bug logs."""
    if is_record(value):
        return record_to_json(value)
    return value


def value_from_json(data: object) -> object:
    if isinstance(data, dict) and "kind" in data:
        return record_from_json(data)
    return data
