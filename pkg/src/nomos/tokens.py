from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

from .source import SourceSpan


class TokenKind(Enum):
    # keywords
    IMPORT = auto()
    INPUT = auto()
    VAR = auto()
    REQUIRES = auto()
    OUTPUT = auto()
    ENSURES = auto()
    FOR = auto()
    IN = auto()
    RANGE = auto()
    TRUE = auto()
    FALSE = auto()
    # literals / names
    IDENT = auto()
    INT = auto()
    STRING = auto()
    # punctuation
    WALRUS = auto()      # :=
    ASSIGN = auto()      # =
    PLUS_ASSIGN = auto()  # +=
    COMMA = auto()
    SEMI = auto()
    COLON = auto()
    LPAREN = auto()
    RPAREN = auto()
    LBRACE = auto()
    RBRACE = auto()
    # operators
    BANG = auto()
    AND_AND = auto()
    OR_OR = auto()
    IMPLIES = auto()     # ==>
    EQ_EQ = auto()
    NEQ = auto()
    LT = auto()
    LEQ = auto()
    GT = auto()
    GEQ = auto()
    PLUS = auto()
    MINUS = auto()
    STAR = auto()
    SLASH = auto()
    EOF = auto()


KEYWORDS: dict[str, TokenKind] = {
    "import": TokenKind.IMPORT,
    "input": TokenKind.INPUT,
    "var": TokenKind.VAR,
    "requires": TokenKind.REQUIRES,
    "output": TokenKind.OUTPUT,
    "ensures": TokenKind.ENSURES,
    "for": TokenKind.FOR,
    "in": TokenKind.IN,
    "range": TokenKind.RANGE,
    "true": TokenKind.TRUE,
    "false": TokenKind.FALSE,
}


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: SourceSpan
    # decoded payload: int value for INT, unescaped text for STRING
    value: object = None

    def __repr__(self) -> str:
        return f"Token({self.kind.name}, {self.lexeme!r}, {self.span})"
