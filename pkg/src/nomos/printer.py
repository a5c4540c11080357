"""Canonical text rendering of a Spec AST.

Re-parsing the output yields a structurally equal tree.
"""

from __future__ import annotations

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

_PREC = {
    "==>": 1,
    "||": 2,
    "&&": 3,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6,
}
_UNARY_PREC = 7


def _prec(expr: Expr) -> int:
    if isinstance(expr, Binary):
        return _PREC[expr.op]
    if isinstance(expr, Unary):
        return _UNARY_PREC
    return 9


def format_expr(expr: Expr) -> str:
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, StrLit):
        escaped = expr.value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(expr, VarRef):
        return expr.name
    if isinstance(expr, Unary):
        inner = format_expr(expr.operand)
        if _prec(expr.operand) < _UNARY_PREC:
            inner = f"({inner})"
        return expr.op + inner
    if isinstance(expr, Binary):
        my = _PREC[expr.op]
        left = format_expr(expr.left)
        right = format_expr(expr.right)
        if expr.op == "==>":
            # right-associative: parenthesize an equal-precedence left child
            if _prec(expr.left) <= my:
                left = f"({left})"
            if _prec(expr.right) < my:
                right = f"({right})"
        else:
            if _prec(expr.left) < my:
                left = f"({left})"
            if _prec(expr.right) <= my:
                right = f"({right})"
        return f"{left} {expr.op} {right}"
    if isinstance(expr, FnCall):
        args = ", ".join(format_expr(a) for a in expr.args)
        return f"{expr.name}({args})"
    raise TypeError(f"unknown expression node {expr!r}")


def _format_stmt(stmt: Stmt, indent: int, out: list[str]) -> None:
    pad = " " * indent
    if isinstance(stmt, Assign):
        out.append(f"{pad}{stmt.target} = {format_expr(stmt.value)}")
    elif isinstance(stmt, AddAssign):
        out.append(f"{pad}{stmt.target} += {format_expr(stmt.value)}")
    elif isinstance(stmt, TupleAssign):
        targets = ", ".join(stmt.targets)
        values = ", ".join(format_expr(v) for v in stmt.values)
        out.append(f"{pad}{targets} = {values}")
    elif isinstance(stmt, ForRange):
        out.append(f"{pad}for {stmt.var} in range({format_expr(stmt.count)}):")
        for inner in stmt.body:
            _format_stmt(inner, indent + 2, out)
    else:
        raise TypeError(f"unknown statement node {stmt!r}")


def pretty_print(spec: Spec) -> str:
    """Render a Spec as canonical source text."""
    lines: list[str] = []
    for name in spec.imports:
        lines.append(f"import {name};")
    for decl in spec.inputs:
        lines.append(f"input {decl.name};")
    for decl in spec.vars:
        lines.append(f"var {decl.name} := {format_expr(decl.init)};")
    for cond in spec.preconds:
        lines.append(f"requires {format_expr(cond)};")
    for decl in spec.outputs:
        lines.append(f"output {decl.name};")
    lines.append("{")
    for stmt in spec.code.stmts:
        _format_stmt(stmt, 2, lines)
    lines.append("}")
    for cond in spec.postconds:
        lines.append(f"ensures {format_expr(cond)};")
    return "\n".join(lines) + "\n"
