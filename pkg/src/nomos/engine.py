"""Test-harness engine: budgeted generate/execute/check loop.

Each candidate test draws every input from its source, evaluates the var
declarations in order, and checks the precondition; a failing precondition
discards the whole candidate and regenerates from fresh draws without
consuming budget. Accepted candidates run the code block, then the oracle
evaluates every postcondition. A violating test becomes a bug whose
identity is the 64-bit FNV-1a hash of its randomness trace; bugs with equal
hashes are duplicates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ast_nodes import (
    AddAssign,
    Assign,
    Binary,
    BoolLit,
    Expr,
    FnCall,
    ForRange,
    IntLit,
    Stmt,
    StrLit,
    TupleAssign,
    Unary,
    VarRef,
)
from .data import DataSource
from .errors import EvalError, NomosError, RetryExhausted
from .records import is_record, record_from_json, record_to_json, value_from_json, value_to_json
from .rng import ReplayTraceRng, Splitmix64, TestTrace, TraceRng
from .sema import MAX_INT_NAME, MAX_INT_VALUE, TypedSpec
from .stdlib import EvalContext, StdlibConfig

DEFAULT_MAX_RETRIES = 100_000

FNV_OFFSET_BASIS = 14695981039346656037
FNV_PRIME = 1099511628211
_MASK64 = (1 << 64) - 1


def hash_trace(trace: TestTrace) -> int:
    """64-bit FNV-1a over the little-endian bytes of each draw."""
    h = FNV_OFFSET_BASIS
    for draw in trace:
        for byte in (draw & _MASK64).to_bytes(8, "little"):
            h ^= byte
            h = (h * FNV_PRIME) & _MASK64
    return h


# ── run artifacts ────────────────────────────────────────────────


@dataclass
class Bug:
    trace_hash: int
    inputs: dict
    vars: dict
    outputs: dict
    violated: list[int]
    seed: int
    test_index: int
    # in-memory only: the raw trace and how many entries belong to generation
    trace: Optional[list] = field(default=None, compare=False, repr=False)
    gen_draws: int = field(default=0, compare=False, repr=False)

    def to_json_dict(self) -> dict:
        return {
            "trace_hash": self.trace_hash,
            "inputs": self.inputs,
            "vars": self.vars,
            "outputs": self.outputs,
            "violated": self.violated,
            "seed": self.seed,
            "test_index": self.test_index,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> Bug:
        return cls(
            trace_hash=data["trace_hash"],
            inputs=data["inputs"],
            vars=data["vars"],
            outputs=data["outputs"],
            violated=list(data["violated"]),
            seed=data["seed"],
            test_index=data["test_index"],
        )


@dataclass
class RunReport:
    budget: int
    seed: int
    passed: int = 0
    precond_violations: int = 0
    postcond_violations: int = 0
    unique_bugs: int = 0
    invocations_per_test: int = 0
    bugs: list[Bug] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "budget": self.budget,
            "seed": self.seed,
            "passed": self.passed,
            "precond_violations": self.precond_violations,
            "postcond_violations": self.postcond_violations,
            "unique_bugs": self.unique_bugs,
            "invocations_per_test": self.invocations_per_test,
            "bugs": [bug.to_json_dict() for bug in self.bugs],
        }


# ── expression/statement interpreter ─────────────────────────────


class _Evaluator:
    def __init__(self, typed_spec: TypedSpec, ctx: EvalContext,
                 backends: dict | None = None):
        self.spec = typed_spec.spec
        self.ctx = ctx
        self.backends = backends or {}
        self.invocations = 0

    # expressions

    def eval(self, expr: Expr, env: dict):
        if isinstance(expr, BoolLit):
            return expr.value
        if isinstance(expr, IntLit):
            return expr.value
        if isinstance(expr, StrLit):
            return expr.value
        if isinstance(expr, VarRef):
            try:
                return env[expr.name]
            except KeyError:
                raise EvalError(f"unbound name {expr.name!r}", expr.span) from None
        if isinstance(expr, Unary):
            return self._eval_unary(expr, env)
        if isinstance(expr, Binary):
            return self._eval_binary(expr, env)
        if isinstance(expr, FnCall):
            return self._eval_call(expr, env)
        raise TypeError(f"unknown expression node {expr!r}")

    def _eval_unary(self, expr: Unary, env: dict):
        value = self.eval(expr.operand, env)
        if expr.op == "!":
            if not isinstance(value, bool):
                raise EvalError(f"! needs a bool, got {type(value).__name__}", expr.span)
            return not value
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise EvalError(f"unary - needs a number, got {type(value).__name__}", expr.span)
        return -value

    def _eval_binary(self, expr: Binary, env: dict):
        op = expr.op
        if op in ("&&", "||", "==>"):
            left = self._eval_bool(expr.left, env, op)
            if op == "&&":
                return left and self._eval_bool(expr.right, env, op)
            if op == "||":
                return left or self._eval_bool(expr.right, env, op)
            return (not left) or self._eval_bool(expr.right, env, op)

        left = self.eval(expr.left, env)
        right = self.eval(expr.right, env)
        if op in ("==", "!="):
            if is_record(left) != is_record(right):
                raise EvalError("cannot compare a record with a scalar", expr.span)
            equal = left == right
            return equal if op == "==" else not equal
        if op in ("<", "<=", ">", ">="):
            self._require_number(left, expr.left, op)
            self._require_number(right, expr.right, op)
            if op == "<":
                return left < right
            if op == "<=":
                return left <= right
            if op == ">":
                return left > right
            return left >= right
        # arithmetic
        self._require_number(left, expr.left, op)
        self._require_number(right, expr.right, op)
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if right == 0:
            raise EvalError("division by zero", expr.span)
        if isinstance(left, int) and isinstance(right, int):
            quotient = left // right  # adjust floor toward zero
            if quotient < 0 and quotient * right != left:
                quotient += 1
            return quotient
        return left / right

    def _eval_bool(self, expr: Expr, env: dict, op: str) -> bool:
        value = self.eval(expr, env)
        if not isinstance(value, bool):
            raise EvalError(f"{op} needs bool operands, got {type(value).__name__}", expr.span)
        return value

    @staticmethod
    def _require_number(value, expr: Expr, op: str) -> None:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise EvalError(f"{op} needs numeric operands, got {type(value).__name__}",
                            expr.span)

    def _eval_call(self, expr: FnCall, env: dict):
        if expr.name in ("predict", "play"):
            if not self.spec.imports:
                raise EvalError(f"{expr.name} needs an imported model", expr.span)
            backend = self.backends.get(self.spec.imports[0])
            if backend is None:
                raise EvalError(f"no backend bound for import {self.spec.imports[0]!r}",
                                expr.span)
            args = [self.eval(a, env) for a in expr.args]
            self.invocations += 1
            if expr.name == "predict":
                return backend.predict(args[0])
            return backend.play(args[0], args[1])
        fn = expr.resolved
        if fn is None:
            raise EvalError(f"unresolved function {expr.name!r}", expr.span)
        args = [self.eval(a, env) for a in expr.args]
        return fn.impl(self.ctx, *args)

    # statements

    def exec_block(self, stmts: list[Stmt], env: dict) -> None:
        for stmt in stmts:
            if isinstance(stmt, Assign):
                env[stmt.target] = self.eval(stmt.value, env)
            elif isinstance(stmt, AddAssign):
                value = self.eval(stmt.value, env)
                current = env.get(stmt.target)
                if current is None:
                    raise EvalError(f"{stmt.target!r} is read before assignment", stmt.span)
                env[stmt.target] = current + value
            elif isinstance(stmt, TupleAssign):
                values = [self.eval(v, env) for v in stmt.values]
                for target, value in zip(stmt.targets, values):
                    env[target] = value
            elif isinstance(stmt, ForRange):
                count = self.eval(stmt.count, env)
                if not isinstance(count, int) or isinstance(count, bool) or count < 0:
                    raise EvalError(f"range() needs a nonnegative int, got {count!r}",
                                    stmt.span)
                for i in range(count):
                    env[stmt.var] = i
                    self.exec_block(stmt.body, env)
                env.pop(stmt.var, None)
            else:
                raise TypeError(f"unknown statement node {stmt!r}")


# ── harness operations ───────────────────────────────────────────


def _base_env() -> dict:
    return {MAX_INT_NAME: MAX_INT_VALUE}


def generate_test(typed_spec: TypedSpec, sources: dict[str, DataSource], rng,
                  *, max_retries: int = DEFAULT_MAX_RETRIES,
                  config: StdlibConfig = StdlibConfig()):
    """Draw inputs and vars until the precondition holds.

    Returns (env, trace_rng, precond_failures). Raises RetryExhausted after
    ``max_retries`` consecutive failing candidates.
    """
    spec = typed_spec.spec
    for decl in spec.inputs:
        if decl.name not in sources:
            raise EvalError(f"no data source bound for input {decl.name!r}", decl.span)
    failures = 0
    while True:
        trace_rng = TraceRng(rng)
        env = _base_env()
        evaluator = _Evaluator(typed_spec, EvalContext(config, trace_rng))
        for decl in spec.inputs:
            source = sources[decl.name]
            env[decl.name] = source.rows[trace_rng.draw_index(len(source))]
        for decl in spec.vars:
            env[decl.name] = evaluator.eval(decl.init, env)
        if all(evaluator.eval(cond, env) for cond in spec.preconds):
            return env, trace_rng, failures
        failures += 1
        if failures >= max_retries:
            raise RetryExhausted(max_retries)


def exec_code(typed_spec: TypedSpec, env: dict, backends: dict, ctx: EvalContext) -> int:
    """Interpret the code block in place; returns the number of model invocations."""
    evaluator = _Evaluator(typed_spec, ctx, backends)
    evaluator.exec_block(typed_spec.spec.code.stmts, env)
    for decl in typed_spec.spec.outputs:
        if decl.name not in env:
            raise EvalError(f"output {decl.name!r} left unbound by the code block", decl.span)
    return evaluator.invocations


def check_postconds(typed_spec: TypedSpec, env: dict,
                    ctx: EvalContext | None = None) -> list[int]:
    """Evaluate every ensures clause; returns the indices of the false ones."""
    evaluator = _Evaluator(typed_spec, ctx or EvalContext())
    violated = []
    for index, cond in enumerate(typed_spec.spec.postconds):
        try:
            holds = evaluator.eval(cond, env)
        except NomosError as exc:
            exc.postcond_index = index
            raise
        if not holds:
            violated.append(index)
    return violated


def run(typed_spec: TypedSpec, sources: dict[str, DataSource], backends: dict,
        *, budget: int, seed: int, max_retries: int = DEFAULT_MAX_RETRIES,
        config: StdlibConfig = StdlibConfig(), rng_factory=None) -> RunReport:
    """Execute ``budget`` precondition-satisfying tests; fully deterministic
    given (spec, sources, backends, seed)."""
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    rng = (rng_factory or Splitmix64)(seed)
    report = RunReport(budget=budget, seed=seed)
    seen_hashes: set[int] = set()

    for test_index in range(budget):
        try:
            env, trace_rng, failures = generate_test(
                typed_spec, sources, rng, max_retries=max_retries, config=config)
            report.precond_violations += failures
            gen_draws = len(trace_rng.trace)
            ctx = EvalContext(config, trace_rng)
            invocations = exec_code(typed_spec, env, backends, ctx)
            if test_index == 0:
                report.invocations_per_test = invocations
            violated = check_postconds(typed_spec, env, ctx)
        except (NomosError, TimeoutError) as exc:
            exc.test_index = test_index
            raise

        if not violated:
            report.passed += 1
            continue
        report.postcond_violations += 1
        digest = hash_trace(trace_rng.trace)
        if digest in seen_hashes:
            continue
        seen_hashes.add(digest)
        spec = typed_spec.spec
        report.bugs.append(Bug(
            trace_hash=digest,
            inputs={d.name: record_to_json(env[d.name]) for d in spec.inputs},
            vars={d.name: value_to_json(env[d.name]) for d in spec.vars},
            outputs={d.name: env[d.name] for d in spec.outputs},
            violated=violated,
            seed=seed,
            test_index=test_index,
            trace=list(trace_rng.trace),
            gen_draws=gen_draws,
        ))
    report.unique_bugs = len(seen_hashes)
    return report


def replay(typed_spec: TypedSpec, bug: Bug, backends: dict,
           config: StdlibConfig = StdlibConfig()) -> list[int]:
    """Re-execute the code block and oracle on a bug's serialized bindings.

    Draws made inside the code block are replayed from the recorded trace;
    bugs loaded from a log (without a trace) replay only if the block is
    randomness-free.
    """
    env = _base_env()
    for name, data in bug.inputs.items():
        env[name] = record_from_json(data)
    for name, data in bug.vars.items():
        env[name] = value_from_json(data)
    tail = bug.trace[bug.gen_draws:] if bug.trace is not None else []
    ctx = EvalContext(config, ReplayTraceRng(tail))
    exec_code(typed_spec, env, backends, ctx)
    return check_postconds(typed_spec, env, ctx)
