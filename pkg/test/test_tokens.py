import pytest

from modules.errors import RenderError, RotLabError, TokenParseError
from modules.tokens import (
    VOCAB_SIZE, Token, TokenKind, digit, parse_number, render_digits, render_number, to_text, token_from_text,
    tokenize, vocabulary_table,
)


def test_vocabulary_ids_are_stable():
    assert Token.PAD == 0
    assert Token.GO == 1 and Token.STOP == 2 and Token.THINK == 3 and Token.TAIL == 4
    assert [int(digit(d)) for d in range(10)] == list(range(5, 15))
    assert VOCAB_SIZE == 44
    assert len({t.text for t in Token}) == VOCAB_SIZE


def test_vocabulary_table_lists_every_token_in_id_order():
    table = vocabulary_table()
    assert [row["id"] for row in table] == list(range(VOCAB_SIZE))
    assert table[0] == {"id": 0, "text": "PAD", "kind": "control"}
    assert {row["kind"] for row in table} == {kind.value for kind in TokenKind}


def test_tokenize_prefers_longest_match():
    assert tokenize("EQUAL") == (Token.EQUAL,)
    assert tokenize("EQ") == (Token.EQ,)
    assert tokenize("GO EQUAL3,4=FALSE STOP") == (
        Token.GO, Token.EQUAL, digit(3), Token.COMMA, digit(4), Token.EQUALS, Token.FALSE, Token.STOP)


def test_tokenize_accepts_compact_and_spaced_forms():
    assert tokenize("GO408+351=") == tokenize("GO 4 0 8 + 3 5 1 =")
    assert to_text(tokenize("GO408+351=")) == "GO 4 0 8 + 3 5 1 ="
    assert to_text(tokenize("76÷29"), sep="") == "76÷29"


def test_tokenize_rejects_unknown_text():
    with pytest.raises(TokenParseError):
        tokenize("GO 4 ? 5")


def test_number_rendering():
    assert render_number(0) == (Token.D0,)
    assert render_number(408) == (digit(4), digit(0), digit(8))
    assert render_digits("") == ()
    assert parse_number(render_number(1234567890123456789)) == 1234567890123456789
    with pytest.raises(RenderError):
        render_number(-1)
    with pytest.raises(RotLabError):
        render_digits("12a")


def test_parse_number_rejects_non_digits():
    with pytest.raises(TokenParseError):
        parse_number((digit(1), Token.PLUS))
    with pytest.raises(TokenParseError):
        parse_number(())


def test_unicode_minus_is_read_as_minus():
    assert tokenize("GO 9 − 4 =") == tokenize("GO 9 - 4 =")
    assert token_from_text("−") is Token.MINUS
    # 출력은 ASCII 표기 하나로 고정
    assert to_text(tokenize("9−4")) == "9 - 4"
