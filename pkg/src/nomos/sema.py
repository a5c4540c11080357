"""Name resolution, kind checking, and spec-level rules.

Rules enforced (diagnostic ids):

  R1  every name resolves to a prior declaration; no duplicate declarations
  R2  preconditions must not reference output variables
  R3  every output is assigned on every path; no reads before assignment;
      inputs and vars are read-only inside the code block
  R4  function/operator arity and kinds match; predict/play appear only in
      the code block and need exactly one imported model
  R5  every requires/ensures expression is boolean

Feature schemas are optional: when an input's schema is known, getFeat and
setFeat are typed per feature; otherwise getFeat yields Float and a W1
warning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Optional

from .ast_nodes import (
    AddAssign,
    Assign,
    Binary,
    BoolLit,
    Expr,
    FnCall,
    ForRange,
    IntLit,
    Spec,
    Stmt,
    StrLit,
    TupleAssign,
    Unary,
    VarRef,
)
from .errors import SemaError
from .records import Schema
from .source import DUMMY_SPAN, SourceSpan

if TYPE_CHECKING:
    from .stdlib import FunctionRegistry

MAX_INT_NAME = "MAX_INT"
MAX_INT_VALUE = 2**31 - 1


class Kind(Enum):
    BOOL = "bool"
    INT = "int"
    FLOAT = "float"
    STRING = "string"
    RECORD = "record"


_FEATURE_KIND = {"int": Kind.INT, "float": Kind.FLOAT, "str": Kind.STRING}
_NUMERIC = (Kind.INT, Kind.FLOAT)

# static record shapes: ("tabular", Schema) | ("grid", (h, w)) | ("gamestate",)
RecordShape = tuple


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    message: str
    span: SourceSpan
    severity: str = "error"
    filename: str = "<spec>"

    def render(self) -> str:
        return (f"{self.filename}:{self.span.line}:{self.span.column}: "
                f"{self.severity}[{self.rule}]: {self.message}")


@dataclass
class Symbol:
    name: str
    role: str  # input | var | output | temp | loop | builtin
    kind: Optional[Kind]
    span: SourceSpan
    shape: Optional[RecordShape] = None


@dataclass
class TypedSpec:
    spec: Spec
    k_static: int
    symbols: dict[str, Symbol]
    warnings: list[Diagnostic] = field(default_factory=list)
    filename: str = "<spec>"


def normalize_shape(shape: object) -> Optional[RecordShape]:
    """Accept a bare feature schema or an explicit ("tabular"|"grid"|"gamestate", ...) tag."""
    if shape is None:
        return None
    if isinstance(shape, tuple) and shape and shape[0] in ("tabular", "grid", "gamestate"):
        return shape
    return ("tabular", tuple((name, kind) for name, kind in shape))


class _Checker:
    def __init__(self, spec: Spec, registry: FunctionRegistry,
                 schemas: dict[str, object] | None, filename: str):
        self.spec = spec
        self.registry = registry
        self.schemas = {name: normalize_shape(s) for name, s in (schemas or {}).items()}
        self.filename = filename
        self.diags: list[Diagnostic] = []
        self.symbols: dict[str, Symbol] = {
            MAX_INT_NAME: Symbol(MAX_INT_NAME, "builtin", Kind.INT, DUMMY_SPAN),
        }
        self.k_static = 0

    # ── diagnostics ──────────────────────────────────────────────

    def _error(self, rule: str, message: str, span: SourceSpan) -> None:
        self.diags.append(Diagnostic(rule, message, span, "error", self.filename))

    def _warn(self, rule: str, message: str, span: SourceSpan) -> None:
        self.diags.append(Diagnostic(rule, message, span, "warning", self.filename))

    # ── declarations ─────────────────────────────────────────────

    def _declare(self, name: str, role: str, kind: Optional[Kind], span: SourceSpan,
                 shape: Optional[RecordShape] = None) -> None:
        if name in self.symbols:
            self._error("R1", f"{name!r} is already declared", span)
            return
        self.symbols[name] = Symbol(name, role, kind, span, shape)

    def run(self) -> TypedSpec:
        for decl in self.spec.inputs:
            self._declare(decl.name, "input", Kind.RECORD, decl.span,
                          self.schemas.get(decl.name))
        for decl in self.spec.vars:
            kind, shape = self._infer(decl.init, context="var")
            self._declare(decl.name, "var", kind, decl.span, shape)
        # outputs are declared before preconditions are checked so that a
        # requires clause naming one yields R2 rather than an R1 resolution error
        for decl in self.spec.outputs:
            self._declare(decl.name, "output", Kind.INT, decl.span)
        for cond in self.spec.preconds:
            kind, _ = self._infer(cond, context="precond")
            if kind is not None and kind is not Kind.BOOL:
                self._error("R5", f"requires expression has kind {kind.value}, expected bool",
                            cond.span)

        definite = self._check_block(self.spec.code.stmts, set())
        for decl in self.spec.outputs:
            if decl.name not in definite and decl.name in self.symbols:
                self._error("R3", f"output {decl.name!r} is not assigned by the code block",
                            decl.span)

        self._postcond_definite = definite
        for cond in self.spec.postconds:
            kind, _ = self._infer(cond, context="postcond")
            if kind is not None and kind is not Kind.BOOL:
                self._error("R5", f"ensures expression has kind {kind.value}, expected bool",
                            cond.span)

        errors = [d for d in self.diags if d.severity == "error"]
        if errors:
            raise SemaError(self.diags)
        warnings = [d for d in self.diags if d.severity == "warning"]
        return TypedSpec(self.spec, self.k_static, dict(self.symbols), warnings, self.filename)

    # ── code block ───────────────────────────────────────────────

    def _check_block(self, stmts: list[Stmt], definite: set[str]) -> set[str]:
        definite = set(definite)
        for stmt in stmts:
            if isinstance(stmt, Assign):
                kind, shape = self._infer(stmt.value, context="code", definite=definite)
                self._assign_target(stmt.target, kind, shape, stmt.span, definite)
            elif isinstance(stmt, AddAssign):
                kind, _ = self._infer(stmt.value, context="code", definite=definite)
                sym = self.symbols.get(stmt.target)
                if sym is None or sym.role not in ("output", "temp", "loop"):
                    self._error("R3", f"cannot apply += to {stmt.target!r}", stmt.span)
                elif stmt.target not in definite and sym.role != "loop":
                    self._error("R3", f"{stmt.target!r} is read by += before assignment",
                                stmt.span)
                elif sym.kind is not None and kind is not None:
                    if sym.kind not in _NUMERIC or kind not in _NUMERIC:
                        self._error("R4", f"+= needs numeric operands, got {sym.kind.value} "
                                          f"and {kind.value}", stmt.span)
                    elif sym.kind is Kind.INT and kind is Kind.FLOAT:
                        self._error("R4", f"+= would narrow float into int {stmt.target!r}",
                                    stmt.span)
            elif isinstance(stmt, TupleAssign):
                inferred = [self._infer(v, context="code", definite=definite)
                            for v in stmt.values]
                for target, (kind, shape) in zip(stmt.targets, inferred):
                    self._assign_target(target, kind, shape, stmt.span, definite)
            elif isinstance(stmt, ForRange):
                kind, _ = self._infer(stmt.count, context="code", definite=definite)
                if kind is not None and kind is not Kind.INT:
                    self._error("R4", f"range() count has kind {kind.value}, expected int",
                                stmt.span)
                fresh_loop_var = stmt.var not in self.symbols
                self._declare(stmt.var, "loop", Kind.INT, stmt.span)
                body_definite = definite | ({stmt.var} if fresh_loop_var else set())
                self._check_block(stmt.body, body_definite)
                if fresh_loop_var:
                    del self.symbols[stmt.var]
                # body may run zero times: nothing new is definite afterwards
            else:
                raise TypeError(f"unknown statement node {stmt!r}")
        return definite

    def _assign_target(self, target: str, kind: Optional[Kind],
                       shape: Optional[RecordShape], span: SourceSpan,
                       definite: set[str]) -> None:
        sym = self.symbols.get(target)
        if sym is None:
            self.symbols[target] = Symbol(target, "temp", kind, span, shape)
            definite.add(target)
            return
        if sym.role in ("input", "var", "builtin", "loop"):
            self._error("R3", f"cannot assign to {sym.role} {target!r}", span)
            return
        if sym.kind is not None and kind is not None and sym.kind is not kind:
            if not (sym.kind is Kind.FLOAT and kind is Kind.INT):
                self._error("R4", f"assignment of {kind.value} to {sym.kind.value} "
                                  f"{target!r}", span)
        definite.add(target)

    # ── expressions ──────────────────────────────────────────────

    def _infer(self, expr: Expr, context: str,
               definite: set[str] | None = None) -> tuple[Optional[Kind], Optional[RecordShape]]:
        kind, shape = self._infer_inner(expr, context, definite)
        expr.kind = kind
        return kind, shape

    def _infer_inner(self, expr, context, definite):
        if isinstance(expr, BoolLit):
            return Kind.BOOL, None
        if isinstance(expr, IntLit):
            return Kind.INT, None
        if isinstance(expr, StrLit):
            return Kind.STRING, None
        if isinstance(expr, VarRef):
            return self._infer_ref(expr, context, definite)
        if isinstance(expr, Unary):
            return self._infer_unary(expr, context, definite)
        if isinstance(expr, Binary):
            return self._infer_binary(expr, context, definite)
        if isinstance(expr, FnCall):
            return self._infer_call(expr, context, definite)
        raise TypeError(f"unknown expression node {expr!r}")

    def _infer_ref(self, expr: VarRef, context: str, definite):
        sym = self.symbols.get(expr.name)
        if sym is None:
            self._error("R1", f"undeclared name {expr.name!r}", expr.span)
            return None, None
        if context == "precond" and sym.role == "output":
            self._error("R2", f"precondition references output {expr.name!r}", expr.span)
            return sym.kind, sym.shape
        if context in ("var", "precond") and sym.role in ("output", "temp", "loop"):
            self._error("R1", f"{expr.name!r} is not visible before the code block", expr.span)
            return None, None
        if context == "code" and sym.role in ("output", "temp"):
            if definite is not None and expr.name not in definite:
                self._error("R3", f"{expr.name!r} is read before assignment", expr.span)
        if context == "postcond" and sym.role == "temp":
            if expr.name not in self._postcond_definite:
                self._error("R3", f"{expr.name!r} is not assigned on every path", expr.span)
        if context == "postcond" and sym.role == "loop":
            self._error("R1", f"loop variable {expr.name!r} is not visible here", expr.span)
        return sym.kind, sym.shape

    def _infer_unary(self, expr: Unary, context, definite):
        kind, _ = self._infer(expr.operand, context, definite)
        if expr.op == "!":
            if kind is not None and kind is not Kind.BOOL:
                self._error("R4", f"! needs a bool operand, got {kind.value}", expr.span)
            return Kind.BOOL, None
        if kind is not None and kind not in _NUMERIC:
            self._error("R4", f"unary - needs a numeric operand, got {kind.value}", expr.span)
            return None, None
        return kind, None

    def _infer_binary(self, expr: Binary, context, definite):
        lk, lshape = self._infer(expr.left, context, definite)
        rk, rshape = self._infer(expr.right, context, definite)
        op = expr.op
        if op in ("&&", "||", "==>"):
            for k, side in ((lk, expr.left), (rk, expr.right)):
                if k is not None and k is not Kind.BOOL:
                    self._error("R4", f"{op} needs bool operands, got {k.value}", side.span)
            return Kind.BOOL, None
        if op in ("+", "-", "*", "/"):
            if lk is None or rk is None:
                return None, None
            if lk not in _NUMERIC or rk not in _NUMERIC:
                self._error("R4", f"{op} needs numeric operands, got {lk.value} and {rk.value}",
                            expr.span)
                return None, None
            return (Kind.INT if lk is Kind.INT and rk is Kind.INT else Kind.FLOAT), None
        if op in ("<", "<=", ">", ">="):
            if lk is not None and rk is not None and (lk not in _NUMERIC or rk not in _NUMERIC):
                self._error("R4", f"{op} needs numeric operands, got {lk.value} and {rk.value}",
                            expr.span)
            return Kind.BOOL, None
        if op in ("==", "!="):
            if lk is not None and rk is not None:
                compatible = (
                    lk is rk
                    or (lk in _NUMERIC and rk in _NUMERIC)
                )
                if not compatible:
                    self._error("R4", f"{op} cannot compare {lk.value} with {rk.value}",
                                expr.span)
            return Kind.BOOL, None
        raise TypeError(f"unknown operator {op!r}")

    def _infer_call(self, expr: FnCall, context, definite):
        arg_types = [self._infer(a, context, definite) for a in expr.args]

        if expr.name in ("predict", "play"):
            return self._infer_invocation(expr, arg_types, context)

        fn = self.registry.get(expr.name)
        if fn is None:
            self._error("R4", f"unknown function {expr.name!r}", expr.span)
            return None, None
        expr.resolved = fn
        if len(expr.args) != len(fn.param_kinds):
            self._error("R4", f"{expr.name} takes {len(fn.param_kinds)} arguments, "
                              f"got {len(expr.args)}", expr.span)
            return fn.return_kind, None
        for param, (kind, _), arg in zip(fn.param_kinds, arg_types, expr.args):
            if kind is None:
                continue
            if param == "scalar":
                if kind is Kind.RECORD:
                    self._error("R4", f"{expr.name} expects a scalar here, got a record",
                                arg.span)
                continue
            if param is Kind.FLOAT and kind is Kind.INT:
                continue
            if kind is not param:
                self._error("R4", f"{expr.name} expects {param.value}, got {kind.value}",
                            arg.span)

        return self._call_result(expr, arg_types)

    def _infer_invocation(self, expr: FnCall, arg_types, context):
        if context != "code":
            self._error("R4", f"{expr.name} is only available inside the code block", expr.span)
            return Kind.INT, None
        if len(self.spec.imports) != 1:
            self._error("R4", f"{expr.name} needs exactly one imported model, "
                              f"spec has {len(self.spec.imports)}", expr.span)
        want = 1 if expr.name == "predict" else 2
        if len(expr.args) != want:
            self._error("R4", f"{expr.name} takes {want} argument(s), got {len(expr.args)}",
                        expr.span)
        else:
            rk, _ = arg_types[0]
            if rk is not None and rk is not Kind.RECORD:
                self._error("R4", f"{expr.name} expects a record, got {rk.value}",
                            expr.args[0].span)
            if expr.name == "play":
                sk, _ = arg_types[1]
                if sk is not None and sk is not Kind.INT:
                    self._error("R4", f"play expects an int seed, got {sk.value}",
                                expr.args[1].span)
        self.k_static += 1
        return Kind.INT, None

    def _call_result(self, expr: FnCall, arg_types):
        name = expr.name
        arg_shape = arg_types[0][1] if arg_types else None

        if name == "getFeat":
            if (arg_shape is not None and arg_shape[0] == "tabular"
                    and len(expr.args) == 2 and isinstance(expr.args[1], IntLit)):
                schema: Schema = arg_shape[1]
                index = expr.args[1].value
                if 0 <= index < len(schema):
                    return _FEATURE_KIND[schema[index][1]], None
                self._error("R4", f"feature index {index} out of range for "
                                  f"{len(schema)}-feature schema", expr.args[1].span)
                return None, None
            self._warn("W1", "feature schema unknown; getFeat is typed as float", expr.span)
            return Kind.FLOAT, None

        if name == "setFeat":
            if (arg_shape is not None and arg_shape[0] == "tabular"
                    and len(expr.args) == 3 and isinstance(expr.args[1], IntLit)):
                schema = arg_shape[1]
                index = expr.args[1].value
                if not 0 <= index < len(schema):
                    self._error("R4", f"feature index {index} out of range for "
                                      f"{len(schema)}-feature schema", expr.args[1].span)
                else:
                    want = _FEATURE_KIND[schema[index][1]]
                    got = arg_types[2][0]
                    if got is not None and got is not want:
                        if not (want is Kind.FLOAT and got is Kind.INT):
                            self._error("R4", f"feature {schema[index][0]!r} has kind "
                                              f"{want.value}, got {got.value}",
                                        expr.args[2].span)
            return Kind.RECORD, arg_shape

        if name in ("blur", "wNoise"):
            if arg_shape is not None and arg_shape[0] != "grid":
                self._error("R4", f"{name} needs a grid record", expr.span)
            return Kind.RECORD, arg_shape

        if name in ("relax", "unrelax"):
            if arg_shape is not None and arg_shape[0] != "gamestate":
                self._error("R4", f"{name} needs a game-state record", expr.span)
            return Kind.RECORD, arg_shape

        fn = self.registry.get(name)
        return fn.return_kind, (arg_shape if fn.return_kind is Kind.RECORD else None)


def check(spec: Spec, registry: FunctionRegistry,
          schemas: dict[str, object] | None = None,
          filename: str = "<spec>") -> TypedSpec:
    """Check a parsed spec; returns the typed spec or raises SemaError.

    ``schemas`` optionally maps input names to record shapes (a feature
    schema tuple, or ("grid", (h, w)), or ("gamestate",)).
    """
    return _Checker(spec, registry, schemas, filename).run()
