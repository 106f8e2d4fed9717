"""문제 타입 정의와 샘플러.

모든 문제는 frozen dataclass 이므로 해시 가능하며, 재귀 풀이 캐시와
컨텍스트 중복 제거의 키로 그대로 쓰인다.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Optional, Union

import numpy as np

from modules.errors import ConfigError
from utils.rng_util import problem_rng


class Ordering(str, Enum):
    LT = "LT"
    EQ = "EQ"
    GT = "GT"


def compare_values(a, b) -> Ordering:
    if a < b:
        return Ordering.LT
    if a > b:
        return Ordering.GT
    return Ordering.EQ


Matrix = tuple[int, int]
Item = tuple[int, int]  # (value, weight)
# MCM 곱셈 순서: 리프는 Matrix, 내부 노드는 (왼쪽 순서, 오른쪽 순서)
Order = Union[Matrix, tuple["Order", "Order"]]


def is_leaf_order(order) -> bool:
    return isinstance(order[0], int)


def order_cost(order) -> tuple[int, Matrix]:
    """주어진 곱셈 순서의 (원소 곱셈 횟수, 결과 행렬 shape)"""
    if is_leaf_order(order):
        return 0, order
    left_cost, (rows, inner) = order_cost(order[0])
    right_cost, (_, cols) = order_cost(order[1])
    return left_cost + right_cost + rows * inner * cols, (rows, cols)


def _check_non_negative(name, *values):
    for value in values:
        if not isinstance(value, int) or value < 0:
            raise ValueError(f"{name}: operands must be non-negative integers, got {value!r}")


@dataclass(frozen=True)
class Problem:
    TASK: ClassVar[str] = ""


@dataclass(frozen=True)
class Add(Problem):
    TASK: ClassVar[str] = "add"
    a: int
    b: int

    def __post_init__(self):
        _check_non_negative("Add", self.a, self.b)


@dataclass(frozen=True)
class Sub(Problem):
    TASK: ClassVar[str] = "sub"
    a: int
    b: int

    def __post_init__(self):
        _check_non_negative("Sub", self.a, self.b)
        if self.a < self.b:
            raise ValueError(f"Sub requires a >= b, got {self.a} - {self.b}")


@dataclass(frozen=True)
class Mul(Problem):
    TASK: ClassVar[str] = "mul"
    a: int
    b: int

    def __post_init__(self):
        _check_non_negative("Mul", self.a, self.b)


@dataclass(frozen=True)
class Div(Problem):
    TASK: ClassVar[str] = "div"
    a: int
    b: int

    def __post_init__(self):
        _check_non_negative("Div", self.a, self.b)
        if self.b < 1:
            raise ValueError("Div requires a divisor >= 1")


@dataclass(frozen=True)
class Compare(Problem):
    TASK: ClassVar[str] = "compare"
    a: int
    b: int

    def __post_init__(self):
        _check_non_negative("Compare", self.a, self.b)


@dataclass(frozen=True)
class Equal(Problem):
    TASK: ClassVar[str] = "equal"
    a: str
    b: str


@dataclass(frozen=True)
class LCS(Problem):
    TASK: ClassVar[str] = "lcs"
    left: str
    right: str


@dataclass(frozen=True)
class LPS(Problem):
    TASK: ClassVar[str] = "lps"
    seq: str

    def __post_init__(self):
        if not self.seq:
            raise ValueError("LPS requires a non-empty sequence")


@dataclass(frozen=True)
class Knapsack(Problem):
    TASK: ClassVar[str] = "knapsack"
    items: tuple[Item, ...]
    capacity: int

    def __post_init__(self):
        if not self.items:
            raise ValueError("Knapsack requires at least one item")
        _check_non_negative("Knapsack", self.capacity)


@dataclass(frozen=True)
class TernaryAdd(Problem):
    TASK: ClassVar[str] = "ternary_add"
    a: int
    b: int
    c: int


@dataclass(frozen=True)
class TernaryMul(Problem):
    TASK: ClassVar[str] = "ternary_mul"
    a: int
    b: int
    c: int


@dataclass(frozen=True)
class MCM(Problem):
    """행렬 체인 곱셈.

    split 이 None 이면 최상위 문제, 아니면 mats[:split] | mats[split:] 분할을
    검사하는 중간 상태이며 best_order/best_cost 에 지금까지의 최선이 누적된다.
    """

    TASK: ClassVar[str] = "mcm"
    mats: tuple[Matrix, ...]
    split: Optional[int] = None
    best_order: Optional[Order] = None
    best_cost: Optional[int] = None

    def __post_init__(self):
        if not self.mats:
            raise ValueError("MCM requires at least one matrix")
        for (_, cols), (rows, _) in zip(self.mats, self.mats[1:]):
            if cols != rows:
                raise ValueError(f"MCM chain shapes do not match: {self.mats}")
        if self.split is not None and not 0 < self.split < len(self.mats):
            raise ValueError(f"MCM split {self.split} out of range for {len(self.mats)} matrices")


@dataclass(frozen=True)
class MergeSort(Problem):
    TASK: ClassVar[str] = "sort"
    items: tuple[int, ...]


@dataclass(frozen=True)
class Merge(Problem):
    TASK: ClassVar[str] = "merge"
    left: tuple[int, ...]
    right: tuple[int, ...]


PROBLEM_TYPES = (Add, Sub, Mul, Div, Compare, Equal, LCS, LPS, Knapsack,
                 TernaryAdd, TernaryMul, MCM, MergeSort, Merge)
TASKS = tuple(cls.TASK for cls in PROBLEM_TYPES)
TASK_TYPES = {cls.TASK: cls for cls in PROBLEM_TYPES}


@dataclass(frozen=True)
class LogUniformParams:
    alpha: int
    beta: int
    delta: float = 3

    def __post_init__(self):
        if self.alpha >= self.beta:
            raise ConfigError(f"LogUniformParams: alpha ({self.alpha}) must be < beta ({self.beta})")
        if self.alpha + self.delta <= 0:
            raise ConfigError(f"LogUniformParams: alpha + delta must be positive, got {self.alpha} + {self.delta}")


# float 정밀도로 정확히 표현되는 자릿수. 이보다 긴 값은 하위 자릿수를 균등 난수로 채운다.
_EXACT_DIGITS = 15


def sample_log_uniform(p: LogUniformParams, rng: np.random.Generator) -> int:
    r = rng.uniform(math.log(p.alpha + p.delta), math.log(p.beta + p.delta))
    x = math.exp(r) - p.delta
    if x < 10 ** _EXACT_DIGITS:
        value = math.floor(x)
    else:
        low_digits = int(math.log10(x)) + 1 - _EXACT_DIGITS
        high = int(x) // 10 ** low_digits
        tail = "".join(str(d) for d in rng.integers(0, 10, size=low_digits))
        value = high * 10 ** low_digits + int(tail)
    # 경계 반올림 보정
    return min(max(value, p.alpha), p.beta - 1)


OPERAND_DELTA = 3
SORT_TERMS = LogUniformParams(0, 1000, 5)
ITEM_RANGE = (1, 99)
MATRIX_RANGE = (1, 99)


def operand_params(difficulty: int, alpha: int = 0) -> LogUniformParams:
    return LogUniformParams(alpha, 10 ** difficulty, OPERAND_DELTA)


def _sample_digit_string(length: int, rng: np.random.Generator) -> str:
    return "".join(str(d) for d in rng.integers(0, 10, size=length))


def _sample_terms(max_terms: int, rng: np.random.Generator) -> list[int]:
    n_terms = int(rng.integers(2, max_terms + 1))
    return [sample_log_uniform(SORT_TERMS, rng) for _ in range(n_terms)]


def sample_problem(task: str, difficulty: int, rng: np.random.Generator) -> Problem:
    """task 별 분포에서 문제 하나를 샘플링한다.

    difficulty 는 산술 문제의 자릿수, LCS/LPS 의 길이, Knapsack 의 아이템 수,
    MCM 의 행렬 수, 정렬/병합의 최대 항 수를 뜻한다.
    """
    if task not in TASK_TYPES:
        raise ConfigError(f"Unsupported task: {task!r} (choose from {', '.join(TASKS)})")
    min_difficulty = 2 if task in ("sort", "merge") else 1
    if not isinstance(difficulty, int) or difficulty < min_difficulty:
        raise ConfigError(f"Unsupported difficulty for {task}: {difficulty!r} (minimum {min_difficulty})")

    operand = operand_params(difficulty)
    if task in ("add", "mul", "compare"):
        a = sample_log_uniform(operand, rng)
        b = sample_log_uniform(operand, rng)
        return TASK_TYPES[task](a, b)
    if task == "sub":
        a = sample_log_uniform(operand, rng)
        b = sample_log_uniform(operand, rng)
        if a < b:
            a, b = b, a
        return Sub(a, b)
    if task == "div":
        b = sample_log_uniform(operand_params(difficulty, alpha=1), rng)
        c = sample_log_uniform(LogUniformParams(0, 10 ** difficulty // b, OPERAND_DELTA), rng)
        r = sample_log_uniform(LogUniformParams(0, b, OPERAND_DELTA), rng)
        return Div(b * c + r, b)
    if task in ("ternary_add", "ternary_mul"):
        a, b, c = (sample_log_uniform(operand, rng) for _ in range(3))
        return TASK_TYPES[task](a, b, c)
    if task == "equal":
        a, b = (str(d) for d in rng.integers(0, 10, size=2))
        return Equal(a, b)
    if task == "lcs":
        return LCS(_sample_digit_string(difficulty, rng), _sample_digit_string(difficulty, rng))
    if task == "lps":
        return LPS(_sample_digit_string(difficulty, rng))
    if task == "knapsack":
        values = rng.integers(ITEM_RANGE[0], ITEM_RANGE[1] + 1, size=difficulty)
        weights = rng.integers(ITEM_RANGE[0], ITEM_RANGE[1] + 1, size=difficulty)
        items = tuple((int(v), int(w)) for v, w in zip(values, weights))
        capacity = int(rng.integers(1, sum(w for _, w in items) + 1))
        return Knapsack(items, capacity)
    if task == "mcm":
        dims = [int(d) for d in rng.integers(MATRIX_RANGE[0], MATRIX_RANGE[1] + 1, size=difficulty + 1)]
        return MCM(tuple(zip(dims, dims[1:])))
    if task == "sort":
        return MergeSort(tuple(_sample_terms(difficulty, rng)))
    # merge: 정렬된 두 리스트로 나눈다
    terms = _sample_terms(difficulty, rng)
    cut = int(rng.integers(0, len(terms) + 1))
    return Merge(tuple(sorted(terms[:cut])), tuple(sorted(terms[cut:])))


def sampler_description(task: str, difficulty: int) -> dict:
    """manifest 에 기록할 샘플러 파라미터"""
    if task == "div":
        return {"divisor": f"U_log(1, 10^{difficulty}, {OPERAND_DELTA})",
                "quotient": f"U_log(0, 10^{difficulty} // b, {OPERAND_DELTA})",
                "remainder": f"U_log(0, b, {OPERAND_DELTA})"}
    if task in ("add", "sub", "mul", "compare", "ternary_add", "ternary_mul"):
        return {"operand": f"U_log(0, 10^{difficulty}, {OPERAND_DELTA})",
                "sub_swap": task == "sub"}
    if task in ("lcs", "lps"):
        return {"length": difficulty, "chars": "uniform 0-9"}
    if task == "knapsack":
        return {"items": difficulty, "value_weight": f"uniform {list(ITEM_RANGE)}",
                "capacity": "uniform [1, sum of weights]"}
    if task == "mcm":
        return {"matrices": difficulty, "dims": f"uniform {list(MATRIX_RANGE)}"}
    if task in ("sort", "merge"):
        return {"terms": f"uniform [2, {difficulty}]",
                "term": f"U_log({SORT_TERMS.alpha}, {SORT_TERMS.beta}, {SORT_TERMS.delta})"}
    return {"chars": "uniform 0-9"}


def sample_problems(task: str, difficulty: int, count: int, seed: int, purpose: str = "test",
                    offset: int = 0) -> list[Problem]:
    """index 별 독립 스트림으로 count 개를 샘플링 (병렬 생성과 같은 결과)"""
    return [sample_problem(task, difficulty, problem_rng(seed, task, difficulty, index, purpose))
            for index in range(offset, offset + count)]
