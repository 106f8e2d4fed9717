"""문제/답 <-> 토큰열 변환.

질문은 항상 GO(꼬리 호출이면 TAIL) 로 시작해 '=' 로 끝나고, 답은 STOP 으로 끝난다.
parse_question / parse_answer 는 render_* 의 역변환이며 오라클 예측기가 사용한다.
"""
from modules.errors import TokenParseError
from modules.problems import (
    LCS, LPS, MCM, Add, Compare, Div, Equal, Knapsack, Merge, MergeSort, Mul,
    Ordering, Problem, Sub, TernaryAdd, TernaryMul, is_leaf_order,
)
from modules.tokens import Token, TokenSeq, digits_to_str, is_digit, parse_number, render_digits, render_number

_ORDERING_TOKENS = {Ordering.LT: Token.LT, Ordering.EQ: Token.EQ, Ordering.GT: Token.GT}
_TOKEN_ORDERINGS = {token: ordering for ordering, token in _ORDERING_TOKENS.items()}


def _join(parts, sep: Token) -> list:
    out = []
    for i, part in enumerate(parts):
        if i:
            out.append(sep)
        out.extend(part)
    return out


def _matrix(m) -> list:
    return [*render_number(m[0]), Token.CROSS, *render_number(m[1])]


def _matrices(mats) -> list:
    return _join([_matrix(m) for m in mats], Token.COMMA)


def _order(order) -> list:
    if is_leaf_order(order):
        return _matrix(order)

    def wrap(child):
        if is_leaf_order(child):
            return _matrix(child)
        return [Token.LPAREN, *_order(child), Token.RPAREN]

    return [*wrap(order[0]), Token.COMMA, *wrap(order[1])]


def _items(items) -> list:
    return _join([[*render_number(v), Token.AMP, *render_number(w)] for v, w in items], Token.COMMA)


def _numbers(values) -> list:
    return _join([render_number(v) for v in values], Token.COMMA)


def question_body(p: Problem) -> list:
    match p:
        case Add(a, b):
            return [*render_number(a), Token.PLUS, *render_number(b)]
        case Sub(a, b):
            return [*render_number(a), Token.MINUS, *render_number(b)]
        case Mul(a, b):
            return [*render_number(a), Token.TIMES, *render_number(b)]
        case Div(a, b):
            return [*render_number(a), Token.DIVIDE, *render_number(b)]
        case Compare(a, b):
            return [*render_number(a), Token.VS, *render_number(b)]
        case Equal(a, b):
            return [Token.EQUAL, *render_digits(a), Token.COMMA, *render_digits(b)]
        case TernaryAdd(a, b, c):
            return [*render_number(a), Token.PLUS, *render_number(b), Token.PLUS, *render_number(c)]
        case TernaryMul(a, b, c):
            return [*render_number(a), Token.TIMES, *render_number(b), Token.TIMES, *render_number(c)]
        case LCS(left, right):
            return [*render_digits(left), Token.LCS, *render_digits(right)]
        case LPS(seq):
            return [Token.LPS, *render_digits(seq)]
        case Knapsack(items, capacity):
            return [Token.KNAPSACK, *_items(items), Token.AT, *render_number(capacity)]
        case MCM(mats, split, best_order, best_cost):
            if split is None:
                return [Token.MCM, *_matrices(mats)]
            # 중간 상태: 왼쪽 그룹 | 오른쪽 그룹 ACC 지금까지의 최선
            return [Token.MCM, *_matrices(mats[:split]), Token.BAR, *_matrices(mats[split:]),
                    Token.ACC, *_order(best_order), Token.SEMI, *render_number(best_cost)]
        case MergeSort(items):
            return [Token.SORT, *_numbers(items)]
        case Merge(left, right):
            return [Token.MERGE, *_numbers(left), Token.BAR, *_numbers(right)]
    raise TypeError(f"Unknown problem type: {type(p).__name__}")


def render_question(p: Problem, tail: bool = False) -> TokenSeq:
    head = Token.TAIL if tail else Token.GO
    return (head, *question_body(p), Token.EQUALS)


def answer_body(p: Problem, value) -> list:
    match p:
        case Div():
            quotient, remainder = value
            return [*render_number(quotient), Token.R, *render_number(remainder)]
        case Compare():
            return [_ORDERING_TOKENS[Ordering(value)]]
        case Equal():
            return [Token.TRUE if value else Token.FALSE]
        case LCS() | LPS():
            seq, length = value
            return [*render_digits(seq), Token.SEMI, *render_number(length)]
        case Knapsack():
            items, total = value
            return [*_items(items), Token.DOLLAR, *render_number(total)]
        case MCM():
            order, cost = value
            return [*_order(order), Token.SEMI, *render_number(cost)]
        case MergeSort() | Merge():
            return _numbers(value)
        case Add() | Sub() | Mul() | TernaryAdd() | TernaryMul():
            return list(render_number(value))
    raise TypeError(f"Unknown problem type: {type(p).__name__}")


def render_answer(p: Problem, value) -> TokenSeq:
    return (*answer_body(p, value), Token.STOP)


class _Reader:
    def __init__(self, tokens):
        self.tokens = tuple(tokens)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def fail(self, message):
        raise TokenParseError(f"{message} at token {self.pos} in {' '.join(t.text for t in self.tokens)!r}")

    def expect(self, token: Token):
        if self.peek() is not token:
            self.fail(f"Expected {token.text!r}")
        self.pos += 1

    def accept(self, token: Token) -> bool:
        if self.peek() is token:
            self.pos += 1
            return True
        return False

    def digits(self) -> str:
        start = self.pos
        while self.peek() is not None and is_digit(self.peek()):
            self.pos += 1
        return digits_to_str(self.tokens[start:self.pos])

    def number(self) -> int:
        start = self.pos
        while self.peek() is not None and is_digit(self.peek()):
            self.pos += 1
        if start == self.pos:
            self.fail("Expected a number")
        return parse_number(self.tokens[start:self.pos])

    def numbers(self) -> tuple[int, ...]:
        if self.peek() is None or not is_digit(self.peek()):
            return ()
        values = [self.number()]
        while self.accept(Token.COMMA):
            values.append(self.number())
        return tuple(values)

    def matrix(self):
        rows = self.number()
        self.expect(Token.CROSS)
        return rows, self.number()

    def matrices(self):
        mats = [self.matrix()]
        while self.peek() is Token.COMMA and self._comma_starts_matrix():
            self.pos += 1
            mats.append(self.matrix())
        return tuple(mats)

    def _comma_starts_matrix(self) -> bool:
        nxt = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else None
        return nxt is not None and is_digit(nxt)

    def order_item(self):
        if self.accept(Token.LPAREN):
            inner = self.order()
            self.expect(Token.RPAREN)
            return inner
        return self.matrix()

    def order(self):
        first = self.order_item()
        if self.accept(Token.COMMA):
            return first, self.order_item()
        return first

    def items(self):
        items = []
        while True:
            value = self.number()
            self.expect(Token.AMP)
            items.append((value, self.number()))
            if not self.accept(Token.COMMA):
                return tuple(items)


def _split_question(ts) -> tuple:
    ts = tuple(ts)
    if len(ts) < 3 or ts[0] not in (Token.GO, Token.TAIL) or ts[-1] is not Token.EQUALS:
        raise TokenParseError(f"Not a question: {' '.join(t.text for t in ts)!r}")
    return ts[1:-1]


def _parse_arithmetic(reader: _Reader) -> Problem:
    operands = [reader.number()]
    op = reader.peek()
    if op not in (Token.PLUS, Token.MINUS, Token.TIMES, Token.DIVIDE, Token.VS):
        reader.fail("Expected an operator")
    while reader.accept(op):
        operands.append(reader.number())
    if len(operands) == 3 and op is Token.PLUS:
        return TernaryAdd(*operands)
    if len(operands) == 3 and op is Token.TIMES:
        return TernaryMul(*operands)
    if len(operands) != 2:
        reader.fail(f"Unexpected operand count {len(operands)}")
    cls = {Token.PLUS: Add, Token.MINUS: Sub, Token.TIMES: Mul, Token.DIVIDE: Div, Token.VS: Compare}[op]
    return cls(*operands)


def parse_question(ts) -> Problem:
    body = _split_question(ts)
    reader = _Reader(body)
    head = reader.peek()
    try:
        if Token.LCS in body:
            left = reader.digits()
            reader.expect(Token.LCS)
            problem = LCS(left, reader.digits())
        elif head is Token.EQUAL:
            reader.pos += 1
            a = reader.digits()
            reader.expect(Token.COMMA)
            problem = Equal(a, reader.digits())
        elif head is Token.LPS:
            reader.pos += 1
            problem = LPS(reader.digits())
        elif head is Token.KNAPSACK:
            reader.pos += 1
            items = reader.items()
            reader.expect(Token.AT)
            problem = Knapsack(items, reader.number())
        elif head is Token.MCM:
            reader.pos += 1
            left = reader.matrices()
            if reader.accept(Token.BAR):
                right = reader.matrices()
                reader.expect(Token.ACC)
                order = reader.order()
                reader.expect(Token.SEMI)
                problem = MCM(left + right, len(left), order, reader.number())
            else:
                problem = MCM(left)
        elif head is Token.SORT:
            reader.pos += 1
            problem = MergeSort(reader.numbers())
        elif head is Token.MERGE:
            reader.pos += 1
            left = reader.numbers()
            reader.expect(Token.BAR)
            problem = Merge(left, reader.numbers())
        else:
            problem = _parse_arithmetic(reader)
    except ValueError as e:
        if isinstance(e, TokenParseError):
            raise
        raise TokenParseError(f"Malformed question: {e}") from e
    if not reader.at_end():
        reader.fail("Trailing tokens")
    return problem


def parse_answer(p: Problem, ts):
    ts = tuple(ts)
    if not ts or ts[-1] is not Token.STOP:
        raise TokenParseError("Answer must end with STOP")
    reader = _Reader(ts[:-1])
    match p:
        case Div():
            quotient = reader.number()
            reader.expect(Token.R)
            value = (quotient, reader.number())
        case Compare():
            token = reader.peek()
            if token not in _TOKEN_ORDERINGS:
                reader.fail("Expected LT/EQ/GT")
            reader.pos += 1
            value = _TOKEN_ORDERINGS[token]
        case Equal():
            if reader.accept(Token.TRUE):
                value = True
            else:
                reader.expect(Token.FALSE)
                value = False
        case LCS() | LPS():
            seq = reader.digits()
            reader.expect(Token.SEMI)
            value = (seq, reader.number())
        case Knapsack():
            items = () if reader.peek() is Token.DOLLAR else reader.items()
            reader.expect(Token.DOLLAR)
            value = (items, reader.number())
        case MCM():
            order = reader.order()
            reader.expect(Token.SEMI)
            value = (order, reader.number())
        case MergeSort() | Merge():
            value = reader.numbers()
        case _:
            value = reader.number()
    if not reader.at_end():
        reader.fail("Trailing tokens")
    return value
