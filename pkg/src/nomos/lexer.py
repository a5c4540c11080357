"""Lexer for Nomos source text.

Identifiers are ``[A-Za-z_][A-Za-z0-9_]*``, integer literals are plain
decimal, and string literals are double-quoted with ``\\"`` and ``\\\\``
escapes. ``#`` starts a comment running to end of line.
"""

from __future__ import annotations

from .errors import LexError
from .source import SourceSpan
from .tokens import KEYWORDS, Token, TokenKind

# longest match first
_PUNCT = [
    ("==>", TokenKind.IMPLIES),
    ("==", TokenKind.EQ_EQ),
    ("!=", TokenKind.NEQ),
    ("<=", TokenKind.LEQ),
    (">=", TokenKind.GEQ),
    (":=", TokenKind.WALRUS),
    ("+=", TokenKind.PLUS_ASSIGN),
    ("&&", TokenKind.AND_AND),
    ("||", TokenKind.OR_OR),
    ("<", TokenKind.LT),
    (">", TokenKind.GT),
    ("=", TokenKind.ASSIGN),
    ("!", TokenKind.BANG),
    ("+", TokenKind.PLUS),
    ("-", TokenKind.MINUS),
    ("*", TokenKind.STAR),
    ("/", TokenKind.SLASH),
    (",", TokenKind.COMMA),
    (";", TokenKind.SEMI),
    (":", TokenKind.COLON),
    ("(", TokenKind.LPAREN),
    (")", TokenKind.RPAREN),
    ("{", TokenKind.LBRACE),
    ("}", TokenKind.RBRACE),
]


def _is_ident_start(ch: str) -> bool:
    return ch.isascii() and (ch.isalpha() or ch == "_")


def _is_ident_part(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch == "_")


class _Lexer:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0
        self.line = 1
        self.col = 1

    def _span(self, length: int) -> SourceSpan:
        return SourceSpan(self.line, self.col, length)

    def _advance(self, n: int) -> None:
        for _ in range(n):
            if self.src[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _peek(self, offset: int = 0) -> str:
        idx = self.pos + offset
        return self.src[idx] if idx < len(self.src) else ""

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while self.pos < len(self.src):
            ch = self._peek()
            if ch in " \t\r\n":
                self._advance(1)
                continue
            if ch == "#":
                while self.pos < len(self.src) and self._peek() != "\n":
                    self._advance(1)
                continue
            if _is_ident_start(ch):
                out.append(self._ident())
                continue
            if ch.isdigit():
                out.append(self._int())
                continue
            if ch == '"':
                out.append(self._string())
                continue
            for text, kind in _PUNCT:
                if self.src.startswith(text, self.pos):
                    tok = Token(kind, text, self._span(len(text)))
                    self._advance(len(text))
                    out.append(tok)
                    break
            else:
                raise LexError(f"illegal character {ch!r}", self._span(1))
        out.append(Token(TokenKind.EOF, "", SourceSpan(self.line, max(self.col, 1), 1)))
        return out

    def _ident(self) -> Token:
        start = self.pos
        span_start = self._span(1)
        while self.pos < len(self.src) and _is_ident_part(self._peek()):
            self._advance(1)
        text = self.src[start:self.pos]
        kind = KEYWORDS.get(text, TokenKind.IDENT)
        return Token(kind, text, SourceSpan(span_start.line, span_start.column, len(text)))

    def _int(self) -> Token:
        start = self.pos
        span_start = self._span(1)
        while self.pos < len(self.src) and self._peek().isdigit():
            self._advance(1)
        text = self.src[start:self.pos]
        span = SourceSpan(span_start.line, span_start.column, len(text))
        if self.pos < len(self.src) and _is_ident_start(self._peek()):
            raise LexError(f"malformed number {text + self._peek()!r}", span)
        return Token(TokenKind.INT, text, span, value=int(text))

    def _string(self) -> Token:
        span_start = self._span(1)
        start = self.pos
        self._advance(1)  # opening quote
        parts: list[str] = []
        while True:
            if self.pos >= len(self.src) or self._peek() == "\n":
                raise LexError("unterminated string literal", span_start)
            ch = self._peek()
            if ch == '"':
                self._advance(1)
                break
            if ch == "\\":
                esc = self._peek(1)
                if esc not in ('"', "\\"):
                    raise LexError(f"unknown escape \\{esc}", self._span(2))
                parts.append(esc)
                self._advance(2)
                continue
            parts.append(ch)
            self._advance(1)
        lexeme = self.src[start:self.pos]
        span = SourceSpan(span_start.line, span_start.column, len(lexeme))
        return Token(TokenKind.STRING, lexeme, span, value="".join(parts))


def tokenize(source: str) -> list[Token]:
    """Split source text into tokens; the trailing EOF token is omitted."""
    return _Lexer(source).tokens()[:-1]


def tokenize_with_eof(source: str) -> list[Token]:
    return _Lexer(source).tokens()
