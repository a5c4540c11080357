from __future__ import annotations

import re

import pytest

from nomos.errors import LexError
from nomos.lexer import tokenize
from nomos.tokens import TokenKind


def kinds(source):
    return [t.kind for t in tokenize(source)]


def test_requires_line_tokens():
    toks = tokenize("requires v2 <= 20;")
    assert [(t.kind, t.lexeme) for t in toks] == [
        (TokenKind.REQUIRES, "requires"),
        (TokenKind.IDENT, "v2"),
        (TokenKind.LEQ, "<="),
        (TokenKind.INT, "20"),
        (TokenKind.SEMI, ";"),
    ]
    assert toks[3].value == 20


def test_empty_input():
    assert tokenize("") == []


def test_illegal_character_column():
    with pytest.raises(LexError) as exc:
        tokenize("var x := §;")
    assert exc.value.span.line == 1
    assert exc.value.span.column == 10


def test_comment_runs_to_end_of_line():
    toks = tokenize("d1; # 0-low, 1-medium, 2-high risk\nd2;")
    assert [t.lexeme for t in toks] == ["d1", ";", "d2", ";"]


def test_maximal_munch_implies_vs_eq():
    assert kinds("a ==> b") == [TokenKind.IDENT, TokenKind.IMPLIES, TokenKind.IDENT]
    assert kinds("a == b") == [TokenKind.IDENT, TokenKind.EQ_EQ, TokenKind.IDENT]
    assert kinds("x := 1") == [TokenKind.IDENT, TokenKind.WALRUS, TokenKind.INT]
    assert kinds("o1 += 1") == [TokenKind.IDENT, TokenKind.PLUS_ASSIGN, TokenKind.INT]


def test_string_escapes():
    toks = tokenize(r'"bad \"wifi\" and \\ more"')
    assert toks[0].kind is TokenKind.STRING
    assert toks[0].value == 'bad "wifi" and \\ more'


def test_unterminated_string():
    with pytest.raises(LexError):
        tokenize('"no closing quote')


def test_unknown_escape():
    with pytest.raises(LexError):
        tokenize(r'"bad \n escape"')


def test_lexemes_reproduce_source_modulo_whitespace(specs_dir):
    for path in sorted(specs_dir.glob("*.nomos")):
        source = path.read_text(encoding="utf-8")
        stripped = re.sub(r"#[^\n]*", "", source)
        stripped = re.sub(r"\s+", "", stripped)
        joined = "".join(t.lexeme for t in tokenize(source))
        assert joined == stripped, path.name


def test_spans_are_one_based():
    toks = tokenize("input x1;\nvar v := 3;")
    assert toks[0].span.line == 1 and toks[0].span.column == 1
    var_tok = [t for t in toks if t.lexeme == "var"][0]
    assert var_tok.span.line == 2 and var_tok.span.column == 1
