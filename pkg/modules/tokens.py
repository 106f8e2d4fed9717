from enum import Enum, IntEnum

from modules.errors import RenderError, TokenParseError


class TokenKind(str, Enum):
    DIGIT = "digit"
    OP = "op"
    WORD = "word"
    CONTROL = "control"


class Token(IntEnum):
    """고정 어휘. id 순서는 데이터셋 직렬화 호환을 위해 절대 바꾸지 않는다."""

    def __new__(cls, value, text, kind):
        obj = int.__new__(cls, value)
        obj._value_ = value
        obj.text = text
        obj.kind = kind
        return obj

    # 제어 토큰 (PAD 는 0 고정: loss 의 ignore_index)
    PAD = 0, "PAD", TokenKind.CONTROL
    GO = 1, "GO", TokenKind.CONTROL
    STOP = 2, "STOP", TokenKind.CONTROL
    THINK = 3, "THINK", TokenKind.CONTROL
    TAIL = 4, "TAIL", TokenKind.CONTROL

    D0 = 5, "0", TokenKind.DIGIT
    D1 = 6, "1", TokenKind.DIGIT
    D2 = 7, "2", TokenKind.DIGIT
    D3 = 8, "3", TokenKind.DIGIT
    D4 = 9, "4", TokenKind.DIGIT
    D5 = 10, "5", TokenKind.DIGIT
    D6 = 11, "6", TokenKind.DIGIT
    D7 = 12, "7", TokenKind.DIGIT
    D8 = 13, "8", TokenKind.DIGIT
    D9 = 14, "9", TokenKind.DIGIT

    PLUS = 15, "+", TokenKind.OP
    MINUS = 16, "-", TokenKind.OP
    TIMES = 17, "*", TokenKind.OP
    DIVIDE = 18, "÷", TokenKind.OP
    EQUALS = 19, "=", TokenKind.OP
    VS = 20, "VS", TokenKind.OP
    R = 21, "R", TokenKind.OP
    COMMA = 22, ",", TokenKind.OP
    SEMI = 23, ";", TokenKind.OP
    AMP = 24, "&", TokenKind.OP
    AT = 25, "@", TokenKind.OP
    DOLLAR = 26, "$", TokenKind.OP
    CROSS = 27, "×", TokenKind.OP
    LPAREN = 28, "(", TokenKind.OP
    RPAREN = 29, ")", TokenKind.OP
    BAR = 30, "|", TokenKind.OP

    LCS = 31, "LCS", TokenKind.WORD
    LPS = 32, "LPS", TokenKind.WORD
    KNAPSACK = 33, "KNAPSACK", TokenKind.WORD
    MCM = 34, "MCM", TokenKind.WORD
    SORT = 35, "SORT", TokenKind.WORD
    MERGE = 36, "MERGE", TokenKind.WORD
    ACC = 37, "ACC", TokenKind.WORD
    EQUAL = 38, "EQUAL", TokenKind.WORD
    TRUE = 39, "TRUE", TokenKind.WORD
    FALSE = 40, "FALSE", TokenKind.WORD
    LT = 41, "LT", TokenKind.WORD
    EQ = 42, "EQ", TokenKind.WORD
    GT = 43, "GT", TokenKind.WORD

    def __repr__(self):
        return f"<{self.text}>"


TokenSeq = tuple[Token, ...]

VOCAB_SIZE = len(Token)
DIGITS: tuple[Token, ...] = tuple(t for t in Token if t.kind is TokenKind.DIGIT)
CONTROL_TOKENS = frozenset({Token.PAD, Token.GO, Token.STOP, Token.THINK, Token.TAIL})

_BY_TEXT = {t.text: t for t in Token}
# 입력에서만 받는 다른 표기. 출력은 항상 Token.text (ASCII "-")
TEXT_ALIASES = {"−": Token.MINUS}
# 최장 일치 우선 (EQUAL vs EQ)
_TEXTS_LONGEST_FIRST = sorted(_BY_TEXT, key=len, reverse=True)


def digit(d: int) -> Token:
    return DIGITS[d]


def is_digit(token: Token) -> bool:
    return token.kind is TokenKind.DIGIT


def token_from_text(text: str) -> Token:
    try:
        return _BY_TEXT[text] if text in _BY_TEXT else TEXT_ALIASES[text]
    except KeyError:
        raise TokenParseError(f"Unknown token text: {text!r}") from None


def render_number(n: int) -> TokenSeq:
    if n < 0:
        raise RenderError(f"render_number expects a non-negative integer, got {n}")
    return tuple(DIGITS[int(ch)] for ch in str(n))


def render_digits(s: str) -> TokenSeq:
    """숫자 문자열을 그대로 토큰화 (LCS/LPS 시퀀스, 빈 문자열 허용)"""
    if not all(ch in "0123456789" for ch in s):
        raise RenderError(f"render_digits expects decimal digits only, got {s!r}")
    return tuple(DIGITS[int(ch)] for ch in s)


def parse_number(ts) -> int:
    if not ts:
        raise TokenParseError("parse_number: empty token sequence")
    value = 0
    for token in ts:
        if not is_digit(token):
            raise TokenParseError(f"parse_number: non-digit token {token.text!r}")
        value = value * 10 + (token - Token.D0)
    return value


def digits_to_str(ts) -> str:
    for token in ts:
        if not is_digit(token):
            raise TokenParseError(f"Expected digits only, got {token.text!r}")
    return "".join(t.text for t in ts)


def tokenize(text: str) -> TokenSeq:
    """텍스트 형태를 토큰열로 변환. 공백은 구분자로만 쓰이며 붙여 쓴 형태도 허용한다.

    >>> to_text(tokenize("GO408+351="))
    'GO 4 0 8 + 3 5 1 ='
    """
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        for candidate in _TEXTS_LONGEST_FIRST:
            if text.startswith(candidate, pos):
                tokens.append(_BY_TEXT[candidate])
                pos += len(candidate)
                break
        else:
            if text[pos] in TEXT_ALIASES:
                tokens.append(TEXT_ALIASES[text[pos]])
                pos += 1
                continue
            raise TokenParseError(f"Unknown token at offset {pos}: {text[pos:pos + 10]!r}")
    return tuple(tokens)


def to_text(ts, sep: str = " ") -> str:
    return sep.join(t.text for t in ts)


def vocabulary_table() -> list[dict]:
    return [{"id": int(t), "text": t.text, "kind": t.kind.value} for t in Token]
