"""Nomos: a specification language for k-safety properties of ML models,
with a metamorphic-testing engine that hunts for postcondition violations."""

from .ast_nodes import Spec
from .engine import Bug, RunReport, check_postconds, exec_code, generate_test, hash_trace, replay, run
from .errors import (
    BackendError,
    ConfigError,
    DimError,
    EvalError,
    KindError,
    LexError,
    ModelFormatError,
    NomosError,
    ParseError,
    ProtocolError,
    ProvenanceError,
    RangeError,
    RetryExhausted,
    SchemaError,
    SemaError,
)
from .data import DataSource, load_dataset
from .lexer import tokenize
from .parser import parse, parse_expr
from .printer import pretty_print
from .records import GameState, Grid, Tabular
from .sema import Diagnostic, Kind, TypedSpec, check
from .stdlib import FunctionRegistry, StdlibConfig, default_registry

__version__ = "0.1.0"

__all__ = [
    "Bug",
    "BackendError",
    "ConfigError",
    "DataSource",
    "Diagnostic",
    "DimError",
    "EvalError",
    "FunctionRegistry",
    "GameState",
    "Grid",
    "Kind",
    "KindError",
    "LexError",
    "ModelFormatError",
    "NomosError",
    "ParseError",
    "ProtocolError",
    "ProvenanceError",
    "RangeError",
    "RetryExhausted",
    "RunReport",
    "SchemaError",
    "SemaError",
    "Spec",
    "StdlibConfig",
    "Tabular",
    "TypedSpec",
    "check",
    "check_postconds",
    "default_registry",
    "exec_code",
    "generate_test",
    "hash_trace",
    "load_dataset",
    "parse",
    "parse_expr",
    "pretty_print",
    "replay",
    "run",
    "tokenize",
]
