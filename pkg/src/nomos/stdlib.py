"""Builtin extension functions over records and scalars.

All functions are pure except randInt and wNoise, which consume draws from
the per-run test-generation RNG. Feature indices are 0-based. Transforms
(setFeat, blur, wNoise, relax, unrelax) drop the dataset provenance label,
so label() only works on records drawn unmodified from a source.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .errors import KindError, ProvenanceError, RangeError
from .records import GameState, Grid, Record, Tabular, provenance
from .sema import Kind

DEFAULT_WNOISE_EPS = 0.05
DEFAULT_BLUR_KERNEL = 3
DEFAULT_H_MAX = 8


@dataclass(frozen=True)
class StdlibConfig:
    wnoise_eps: float = DEFAULT_WNOISE_EPS
    blur_kernel: int = DEFAULT_BLUR_KERNEL
    h_max: int = DEFAULT_H_MAX


@dataclass
class EvalContext:
    """Call-time context handed to every builtin: config plus the trace RNG."""

    config: StdlibConfig = field(default_factory=StdlibConfig)
    rng: object = None  # TraceRng during generation/execution


ParamKind = Union[Kind, str]  # a Kind, or "scalar" for any non-record value


@dataclass(frozen=True)
class NativeFn:
    name: str
    param_kinds: tuple[ParamKind, ...]
    return_kind: Kind
    impl: Callable
    consumes_randomness: bool = False


class FunctionRegistry:
    """Named extension functions; user additions may not shadow the core set."""

    def __init__(self):
        self._fns: dict[str, NativeFn] = {}
        for fn in _core_functions():
            self._fns[fn.name] = fn
        self._core = frozenset(self._fns)

    def get(self, name: str) -> Optional[NativeFn]:
        return self._fns.get(name)

    def names(self) -> frozenset[str]:
        return frozenset(self._fns)

    def core_names(self) -> frozenset[str]:
        return self._core

    def register(self, fn: NativeFn) -> None:
        if fn.name in self._core:
            raise ValueError(f"cannot shadow core function {fn.name!r}")
        self._fns[fn.name] = fn


# ── implementations ──────────────────────────────────────────────


def _require_tabular(r: object, who: str) -> Tabular:
    if not isinstance(r, Tabular):
        raise KindError(f"{who} needs a tabular record, got {type(r).__name__}")
    return r


def _require_grid(r: object, who: str) -> Grid:
    if not isinstance(r, Grid):
        raise KindError(f"{who} needs a grid record, got {type(r).__name__}")
    return r


def get_feat(ctx: EvalContext, r: Record, i: int):
    row = _require_tabular(r, "getFeat")
    if not 0 <= i < len(row.values):
        raise IndexError(f"feature index {i} out of range for {len(row.values)}-feature row")
    return row.values[i]


def set_feat(ctx: EvalContext, r: Record, i: int, value) -> Tabular:
    row = _require_tabular(r, "setFeat")
    if not 0 <= i < len(row.values):
        raise IndexError(f"feature index {i} out of range for {len(row.values)}-feature row")
    name, feat_kind = row.schema[i]
    if feat_kind == "int":
        if not isinstance(value, int) or isinstance(value, bool):
            raise KindError(f"feature {name!r} is int, got {type(value).__name__}")
    elif feat_kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise KindError(f"feature {name!r} is float, got {type(value).__name__}")
        value = float(value)
    else:
        if not isinstance(value, str):
            raise KindError(f"feature {name!r} is str, got {type(value).__name__}")
    values = row.values[:i] + (value,) + row.values[i + 1:]
    return Tabular(schema=row.schema, values=values, label=None)


def label(ctx: EvalContext, r: Record) -> int:
    stored = provenance(r)
    if stored is None:
        raise ProvenanceError("label() needs a record drawn unmodified from a labeled source")
    return stored


def rand_int(ctx: EvalContext, lo: int, hi: int) -> int:
    if lo > hi:
        raise RangeError(f"randInt range [{lo}, {hi}] is empty")
    return ctx.rng.draw_randint(lo, hi)


def str_concat(ctx: EvalContext, a: str, b: str) -> str:
    return a + b


def blur(ctx: EvalContext, r: Record) -> Grid:
    grid = _require_grid(r, "blur")
    k = ctx.config.blur_kernel
    if k < 1 or k % 2 == 0:
        raise ValueError(f"blur kernel must be odd and >= 1, got {k}")
    half = k // 2
    h, w = grid.height, grid.width
    cells = []
    for row in range(h):
        for col in range(w):
            total = 0.0
            for dr in range(-half, half + 1):
                rr = min(max(row + dr, 0), h - 1)
                for dc in range(-half, half + 1):
                    cc = min(max(col + dc, 0), w - 1)
                    total += grid.at(rr, cc)
            cells.append(total / (k * k))
    return Grid(height=h, width=w, cells=tuple(cells), label=None)


def w_noise(ctx: EvalContext, r: Record) -> Grid:
    grid = _require_grid(r, "wNoise")
    eps = ctx.config.wnoise_eps
    cells = []
    for value in grid.cells:
        word = ctx.rng.draw_noise_u64()
        u = (word >> 11) * (2.0 ** -53)
        noisy = value + (2.0 * u - 1.0) * eps
        cells.append(min(max(noisy, 0.0), 1.0))
    return Grid(height=grid.height, width=grid.width, cells=tuple(cells), label=None)


def relax(ctx: EvalContext, s: Record) -> GameState:
    if not isinstance(s, GameState):
        raise KindError(f"relax needs a game state, got {type(s).__name__}")
    return GameState(terrain=max(s.terrain - 1, 0), lander_x=s.lander_x,
                     lander_vy=s.lander_vy, fuel=s.fuel)


def unrelax(ctx: EvalContext, s: Record) -> GameState:
    if not isinstance(s, GameState):
        raise KindError(f"unrelax needs a game state, got {type(s).__name__}")
    return GameState(terrain=min(s.terrain + 1, ctx.config.h_max), lander_x=s.lander_x,
                     lander_vy=s.lander_vy, fuel=s.fuel)


def _core_functions() -> list[NativeFn]:
    R, I, S = Kind.RECORD, Kind.INT, Kind.STRING
    return [
        NativeFn("getFeat", (R, I), Kind.FLOAT, get_feat),  # return kind is schema-driven
        NativeFn("setFeat", (R, I, "scalar"), R, set_feat),
        NativeFn("label", (R,), I, label),
        NativeFn("randInt", (I, I), I, rand_int, consumes_randomness=True),
        NativeFn("strConcat", (S, S), S, str_concat),
        NativeFn("blur", (R,), R, blur),
        NativeFn("wNoise", (R,), R, w_noise, consumes_randomness=True),
        NativeFn("relax", (R,), R, relax),
        NativeFn("unrelax", (R,), R, unrelax),
    ]


def default_registry() -> FunctionRegistry:
    return FunctionRegistry()
