"""AST for Nomos specifications.

Structural equality ignores spans and checker annotations, so a pretty-printed
and re-parsed tree compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .source import DUMMY_SPAN, SourceSpan

# ── Expressions ──────────────────────────────────────────────────

UNARY_OPS = ("!", "-")
BINARY_OPS = ("||", "&&", "==>", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/")


@dataclass
class Expr:
    span: SourceSpan = field(default=DUMMY_SPAN, compare=False, repr=False)
    # filled in by the checker
    kind: object = field(default=None, compare=False, repr=False)


@dataclass
class BoolLit(Expr):
    value: bool = False


@dataclass
class IntLit(Expr):
    value: int = 0


@dataclass
class StrLit(Expr):
    value: str = ""


@dataclass
class VarRef(Expr):
    name: str = ""


@dataclass
class Unary(Expr):
    op: str = "!"
    operand: Expr | None = None


@dataclass
class Binary(Expr):
    op: str = "&&"
    left: Expr | None = None
    right: Expr | None = None


@dataclass
class FnCall(Expr):
    name: str = ""
    args: list[Expr] = field(default_factory=list)
    # resolved signature, filled in by the checker
    resolved: object = field(default=None, compare=False, repr=False)


# ── Statements (code-block mini language) ────────────────────────


@dataclass
class Stmt:
    span: SourceSpan = field(default=DUMMY_SPAN, compare=False, repr=False)


@dataclass
class Assign(Stmt):
    target: str = ""
    value: Expr | None = None


@dataclass
class AddAssign(Stmt):
    target: str = ""
    value: Expr | None = None


@dataclass
class TupleAssign(Stmt):
    targets: list[str] = field(default_factory=list)
    values: list[Expr] = field(default_factory=list)


@dataclass
class ForRange(Stmt):
    var: str = "_"
    count: Expr | None = None
    body: list[Stmt] = field(default_factory=list)


# ── Declarations and the spec itself ─────────────────────────────


@dataclass
class InputDecl:
    name: str
    span: SourceSpan = field(default=DUMMY_SPAN, compare=False, repr=False)


@dataclass
class OutputDecl:
    name: str
    span: SourceSpan = field(default=DUMMY_SPAN, compare=False, repr=False)


@dataclass
class VarDecl:
    name: str
    init: Expr
    span: SourceSpan = field(default=DUMMY_SPAN, compare=False, repr=False)


@dataclass
class CodeBlock:
    stmts: list[Stmt] = field(default_factory=list)
    span: SourceSpan = field(default=DUMMY_SPAN, compare=False, repr=False)


@dataclass
class Spec:
    imports: list[str] = field(default_factory=list)
    inputs: list[InputDecl] = field(default_factory=list)
    vars: list[VarDecl] = field(default_factory=list)
    preconds: list[Expr] = field(default_factory=list)
    outputs: list[OutputDecl] = field(default_factory=list)
    code: CodeBlock = field(default_factory=CodeBlock)
    postconds: list[Expr] = field(default_factory=list)


def walk_exprs(expr: Expr):
    """Yield expr and all of its descendants, preorder."""
    yield expr
    if isinstance(expr, Unary) and expr.operand is not None:
        yield from walk_exprs(expr.operand)
    elif isinstance(expr, Binary):
        yield from walk_exprs(expr.left)
        yield from walk_exprs(expr.right)
    elif isinstance(expr, FnCall):
        for arg in expr.args:
            yield from walk_exprs(arg)


def walk_stmts(stmts: list[Stmt]):
    """Yield statements depth-first, loop bodies included."""
    for stmt in stmts:
        yield stmt
        if isinstance(stmt, ForRange):
            yield from walk_stmts(stmt.body)
