"""Recursive-descent parser producing a Spec AST.

Section order follows the language grammar: imports, inputs, var
declarations, preconditions, outputs, the braced code block, then
postconditions. Expression precedence, tightest first:

    unary ! -        (prefix)
    * /
    + -
    == != < <= > >=  (left-associative)
    &&
    ||
    ==>              (right-associative)

Statements inside the code block are written one per line; a ``for``
loop's body consists of the following statements indented further than
the ``for`` keyword (measured by start column).
"""

from __future__ import annotations

from .ast_nodes import (
    AddAssign,
    Assign,
    Binary,
    BoolLit,
    CodeBlock,
    Expr,
    FnCall,
    ForRange,
    InputDecl,
    IntLit,
    OutputDecl,
    Spec,
    Stmt,
    StrLit,
    TupleAssign,
    Unary,
    VarDecl,
    VarRef,
)
from .errors import ParseError
from .lexer import tokenize_with_eof
from .tokens import Token, TokenKind

_KIND_NAMES = {
    TokenKind.SEMI: '";"',
    TokenKind.WALRUS: '":="',
    TokenKind.ASSIGN: '"="',
    TokenKind.COLON: '":"',
    TokenKind.LPAREN: '"("',
    TokenKind.RPAREN: '")"',
    TokenKind.LBRACE: '"{"',
    TokenKind.RBRACE: '"}"',
    TokenKind.COMMA: '","',
    TokenKind.IDENT: "identifier",
    TokenKind.INT: "integer",
    TokenKind.STRING: "string",
    TokenKind.IN: '"in"',
    TokenKind.RANGE: '"range"',
    TokenKind.EOF: "end of input",
}


def _name_of(kind: TokenKind) -> str:
    return _KIND_NAMES.get(kind, f'"{kind.name.lower()}"')


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # ── token access ─────────────────────────────────────────────

    def _current(self) -> Token:
        return self.tokens[self.pos]

    def _at(self, kind: TokenKind) -> bool:
        return self._current().kind == kind

    def _advance(self) -> Token:
        tok = self._current()
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def _expect(self, kind: TokenKind) -> Token:
        if self._at(kind):
            return self._advance()
        tok = self._current()
        raise ParseError(
            f"expected {_name_of(kind)}, got {tok.lexeme!r}" if tok.lexeme
            else f"expected {_name_of(kind)}, got end of input",
            tok.span,
            expected=frozenset({_name_of(kind)}),
        )

    def _fail(self, message: str, expected: frozenset[str]) -> ParseError:
        return ParseError(message, self._current().span, expected=expected)

    # ── spec sections ────────────────────────────────────────────

    def parse_spec(self) -> Spec:
        spec = Spec()
        while self._at(TokenKind.IMPORT):
            self._advance()
            name = self._expect(TokenKind.IDENT)
            self._expect(TokenKind.SEMI)
            spec.imports.append(name.lexeme)

        if not self._at(TokenKind.INPUT):
            raise self._fail(
                f"expected \"input\" declaration, got {self._current().lexeme!r}",
                frozenset({'"input"'}),
            )
        while self._at(TokenKind.INPUT):
            kw = self._advance()
            name = self._expect(TokenKind.IDENT)
            self._expect(TokenKind.SEMI)
            spec.inputs.append(InputDecl(name.lexeme, span=kw.span))

        while self._at(TokenKind.VAR):
            kw = self._advance()
            name = self._expect(TokenKind.IDENT)
            self._expect(TokenKind.WALRUS)
            init = self.parse_expr()
            self._expect(TokenKind.SEMI)
            spec.vars.append(VarDecl(name.lexeme, init, span=kw.span))

        while self._at(TokenKind.REQUIRES):
            self._advance()
            cond = self.parse_expr()
            self._expect(TokenKind.SEMI)
            spec.preconds.append(cond)

        while self._at(TokenKind.OUTPUT):
            kw = self._advance()
            name = self._expect(TokenKind.IDENT)
            self._expect(TokenKind.SEMI)
            spec.outputs.append(OutputDecl(name.lexeme, span=kw.span))

        lbrace = self._expect(TokenKind.LBRACE)
        stmts = self._parse_stmts(stop_col=None)
        self._expect(TokenKind.RBRACE)
        spec.code = CodeBlock(stmts, span=lbrace.span)

        while self._at(TokenKind.ENSURES):
            self._advance()
            cond = self.parse_expr()
            self._expect(TokenKind.SEMI)
            spec.postconds.append(cond)

        self._expect(TokenKind.EOF)
        return spec

    # ── statements ───────────────────────────────────────────────

    def _parse_stmts(self, stop_col: int | None) -> list[Stmt]:
        """Parse statements until '}' or a token at column <= stop_col."""
        stmts: list[Stmt] = []
        while True:
            tok = self._current()
            if tok.kind in (TokenKind.RBRACE, TokenKind.EOF):
                return stmts
            if stop_col is not None and tok.span.column <= stop_col:
                return stmts
            stmts.append(self._parse_stmt())

    def _parse_stmt(self) -> Stmt:
        tok = self._current()
        if tok.kind is TokenKind.FOR:
            return self._parse_for()
        if tok.kind is not TokenKind.IDENT:
            raise self._fail(
                f"expected statement, got {tok.lexeme!r}",
                frozenset({"identifier", '"for"'}),
            )
        first = self._advance()
        nxt = self._current()
        if nxt.kind is TokenKind.ASSIGN:
            self._advance()
            return Assign(span=first.span, target=first.lexeme, value=self.parse_expr())
        if nxt.kind is TokenKind.PLUS_ASSIGN:
            self._advance()
            return AddAssign(span=first.span, target=first.lexeme, value=self.parse_expr())
        if nxt.kind is TokenKind.COMMA:
            targets = [first.lexeme]
            while self._at(TokenKind.COMMA):
                self._advance()
                targets.append(self._expect(TokenKind.IDENT).lexeme)
            self._expect(TokenKind.ASSIGN)
            values = [self.parse_expr()]
            while self._at(TokenKind.COMMA):
                self._advance()
                values.append(self.parse_expr())
            if len(values) != len(targets):
                raise ParseError(
                    f"expected {len(targets)} expressions on the right of a "
                    f"{len(targets)}-target assignment, got {len(values)}",
                    first.span,
                )
            return TupleAssign(span=first.span, targets=targets, values=values)
        raise self._fail(
            f"expected \"=\", \"+=\" or \",\" after {first.lexeme!r}",
            frozenset({'"="', '"+="', '","'}),
        )

    def _parse_for(self) -> ForRange:
        kw = self._expect(TokenKind.FOR)
        var = self._expect(TokenKind.IDENT)
        self._expect(TokenKind.IN)
        self._expect(TokenKind.RANGE)
        self._expect(TokenKind.LPAREN)
        count = self.parse_expr()
        self._expect(TokenKind.RPAREN)
        self._expect(TokenKind.COLON)
        body = self._parse_stmts(stop_col=kw.span.column)
        if not body:
            raise ParseError("empty loop body", kw.span)
        return ForRange(span=kw.span, var=var.lexeme, count=count, body=body)

    # ── expressions ──────────────────────────────────────────────

    def parse_expr(self) -> Expr:
        return self._parse_implies()

    def _parse_implies(self) -> Expr:
        left = self._parse_or()
        if self._at(TokenKind.IMPLIES):
            op = self._advance()
            right = self._parse_implies()  # right-associative
            return Binary(span=op.span, op="==>", left=left, right=right)
        return left

    def _parse_or(self) -> Expr:
        left = self._parse_and()
        while self._at(TokenKind.OR_OR):
            op = self._advance()
            left = Binary(span=op.span, op="||", left=left, right=self._parse_and())
        return left

    def _parse_and(self) -> Expr:
        left = self._parse_cmp()
        while self._at(TokenKind.AND_AND):
            op = self._advance()
            left = Binary(span=op.span, op="&&", left=left, right=self._parse_cmp())
        return left

    _CMP = {
        TokenKind.EQ_EQ: "==",
        TokenKind.NEQ: "!=",
        TokenKind.LT: "<",
        TokenKind.LEQ: "<=",
        TokenKind.GT: ">",
        TokenKind.GEQ: ">=",
    }

    def _parse_cmp(self) -> Expr:
        left = self._parse_add()
        while self._current().kind in self._CMP:
            op = self._advance()
            left = Binary(span=op.span, op=self._CMP[op.kind], left=left, right=self._parse_add())
        return left

    def _parse_add(self) -> Expr:
        left = self._parse_mul()
        while self._current().kind in (TokenKind.PLUS, TokenKind.MINUS):
            op = self._advance()
            sym = "+" if op.kind is TokenKind.PLUS else "-"
            left = Binary(span=op.span, op=sym, left=left, right=self._parse_mul())
        return left

    def _parse_mul(self) -> Expr:
        left = self._parse_unary()
        while self._current().kind in (TokenKind.STAR, TokenKind.SLASH):
            op = self._advance()
            sym = "*" if op.kind is TokenKind.STAR else "/"
            left = Binary(span=op.span, op=sym, left=left, right=self._parse_unary())
        return left

    def _parse_unary(self) -> Expr:
        tok = self._current()
        if tok.kind is TokenKind.BANG:
            self._advance()
            return Unary(span=tok.span, op="!", operand=self._parse_unary())
        if tok.kind is TokenKind.MINUS:
            self._advance()
            return Unary(span=tok.span, op="-", operand=self._parse_unary())
        return self._parse_primary()

    def _parse_primary(self) -> Expr:
        tok = self._current()
        if tok.kind is TokenKind.INT:
            self._advance()
            return IntLit(span=tok.span, value=tok.value)
        if tok.kind is TokenKind.STRING:
            self._advance()
            return StrLit(span=tok.span, value=tok.value)
        if tok.kind is TokenKind.TRUE:
            self._advance()
            return BoolLit(span=tok.span, value=True)
        if tok.kind is TokenKind.FALSE:
            self._advance()
            return BoolLit(span=tok.span, value=False)
        if tok.kind is TokenKind.LPAREN:
            self._advance()
            inner = self.parse_expr()
            self._expect(TokenKind.RPAREN)
            return inner
        if tok.kind is TokenKind.IDENT:
            self._advance()
            if self._at(TokenKind.LPAREN):
                self._advance()
                args: list[Expr] = []
                if not self._at(TokenKind.RPAREN):
                    args.append(self.parse_expr())
                    while self._at(TokenKind.COMMA):
                        self._advance()
                        args.append(self.parse_expr())
                self._expect(TokenKind.RPAREN)
                return FnCall(span=tok.span, name=tok.lexeme, args=args)
            return VarRef(span=tok.span, name=tok.lexeme)
        raise self._fail(
            f"expected expression, got {tok.lexeme!r}" if tok.lexeme
            else "expected expression, got end of input",
            frozenset({"identifier", "integer", "string", '"("', '"true"', '"false"', '"!"', '"-"'}),
        )


def parse(source: str) -> Spec:
    """Parse Nomos source text into a Spec."""
    return _Parser(tokenize_with_eof(source)).parse_spec()


def parse_expr(source: str) -> Expr:
    """Parse a single expression; the whole input must be consumed."""
    parser = _Parser(tokenize_with_eof(source))
    expr = parser.parse_expr()
    parser._expect(TokenKind.EOF)
    return expr
