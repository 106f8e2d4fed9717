"""문제별 재귀 분해 절차 (thought) 와 하위 답으로부터 답을 합치는 combine.

thought() 가 하위 문제의 답을 알아야 다음 하위 문제를 정할 수 있는 경우
(LCS, LPS, Knapsack, MCM) answer_of 콜백으로 답을 조회한다. 아직 풀리지 않은
하위 문제면 _Pending 이 올라가고, Solver 가 그 문제를 먼저 푼 뒤 다시 시도한다.
호스트 콜스택 대신 명시적 작업 스택을 쓰므로 64자리 연산도 깊이 제한에 걸리지 않는다.
"""
from dataclasses import dataclass
from enum import Enum

from modules.errors import RecursionGuardError
from modules.problems import (
    LCS, LPS, MCM, Add, Compare, Div, Equal, Knapsack, Merge, MergeSort, Mul,
    Ordering, Problem, Sub, TernaryAdd, TernaryMul, compare_values,
)

DEFAULT_MAX_DEPTH = 10_000


class RecursionType(str, Enum):
    REGULAR = "regular"
    TAIL = "tail"


@dataclass(frozen=True)
class Thought:
    problem: Problem
    recursion_type: RecursionType = RecursionType.REGULAR

    @property
    def is_tail(self) -> bool:
        return self.recursion_type is RecursionType.TAIL


def _tail(problem: Problem) -> Thought:
    return Thought(problem, RecursionType.TAIL)


class _Pending(Exception):
    def __init__(self, problem):
        super().__init__(problem)
        self.problem = problem


def decompose(p: Problem, answer_of) -> list[Thought]:
    T = Thought
    match p:
        case Add(a, b):
            if a < 10 and b < 10:
                return []
            thoughts = [T(Add(a % 10, b % 10))]
            l_rest, r_rest = a // 10, b // 10
            if a % 10 + b % 10 >= 10:
                # 자리올림
                thoughts.append(T(Add(l_rest, 1)))
                l_rest += 1
            if l_rest > 0 and r_rest > 0:
                thoughts.append(T(Add(l_rest, r_rest)))
            return thoughts

        case Sub(a, b):
            if a <= 19 and b <= 9:
                return []
            # 항상 10을 빌려온다
            l_last, r_last = a % 10 + 10, b % 10
            thoughts = [T(Sub(l_last, r_last))]
            l_rest, r_rest = a // 10, b // 10
            if l_last - r_last < 10:
                thoughts.append(T(Sub(l_rest, 1)))
                l_rest -= 1
            if r_rest > 0:
                thoughts.append(T(Sub(l_rest, r_rest)))
            return thoughts

        case Mul(a, b):
            if a <= 1 or b <= 1 or (a <= 9 and b <= 9):
                return []
            if b < 10:
                return [T(Mul(a % 10, b)), T(Mul(a // 10, b)),
                        _tail(Add(a // 10 * b * 10, a % 10 * b))]
            return [T(Mul(a, b % 10)), T(Mul(a, b // 10)),
                    _tail(Add(a * (b // 10) * 10, a * (b % 10)))]

        case Compare(a, b):
            if a < 10 and b < 10:
                return []
            left, right = str(a), str(b)
            if len(left) != len(right):
                return []
            thoughts = [T(Compare(int(left[0]), int(right[0])))]
            if left[0] == right[0]:
                thoughts.append(T(Compare(int(left[1:]), int(right[1:]))))
            return thoughts

        case Equal():
            return []

        case Div(a, b):
            thoughts = [T(Compare(a, b))]
            if a <= b:
                return thoughts
            thoughts.append(T(Compare(a, b * 10)))
            if a <= b * 10:
                thoughts += [T(Sub(a, b)), T(Div(a - b, b))]
            else:
                thoughts += [T(Div(a // 10, b)), T(Div((a // 10) % b * 10 + a % 10, b))]
            return thoughts

        case LCS(left, right):
            if not left or not right:
                return []
            thoughts = [T(Equal(left[-1], right[-1]))]
            if left[-1] == right[-1]:
                thoughts.append(T(LCS(left[:-1], right[:-1])))
                return thoughts
            _, len1 = answer_of(LCS(left[:-1], right))
            _, len2 = answer_of(LCS(left, right[:-1]))
            thoughts += [T(LCS(left[:-1], right)), T(LCS(left, right[:-1])), T(Compare(len1, len2))]
            return thoughts

        case LPS(seq):
            if len(seq) == 1:
                return []
            if len(seq) == 2:
                return [T(Equal(seq[0], seq[1]))]
            thoughts = [T(Equal(seq[0], seq[-1]))]
            if seq[0] == seq[-1]:
                _, inner = answer_of(LPS(seq[1:-1]))
                thoughts += [T(LPS(seq[1:-1])), T(Add(inner, 2))]
                return thoughts
            _, len1 = answer_of(LPS(seq[:-1]))
            _, len2 = answer_of(LPS(seq[1:]))
            thoughts += [T(LPS(seq[:-1])), T(LPS(seq[1:])), T(Compare(len1, len2))]
            return thoughts

        case Knapsack(items, capacity):
            value, weight = items[0]
            if len(items) == 1:
                return [T(Compare(weight, capacity))]
            rest = items[1:]
            _, value_max = answer_of(Knapsack(rest, capacity))
            thoughts = [T(Knapsack(rest, capacity)), T(Compare(weight, capacity))]
            if weight <= capacity:
                _, value_sub = answer_of(Knapsack(rest, capacity - weight))
                thoughts += [
                    T(Sub(capacity, weight)),
                    T(Knapsack(rest, capacity - weight)),
                    T(Add(value_sub, value)),
                    T(Compare(value_sub + value, value_max)),
                ]
            return thoughts

        case TernaryAdd(a, b, c):
            return [T(Add(a, b)), _tail(Add(a + b, c))]

        case TernaryMul(a, b, c):
            return [T(Mul(a, b)), _tail(Mul(a * b, c))]

        case MCM(mats, split, best_order, best_cost):
            if split is None:
                if len(mats) == 1:
                    return []
                split = 1
            left, right = mats[:split], mats[split:]
            l_order, l_cost = answer_of(MCM(left))
            r_order, r_cost = answer_of(MCM(right))
            agg = left[0][0] * right[0][0] * right[-1][1]
            cost = l_cost + r_cost + agg
            thoughts = [
                T(MCM(left)),
                T(MCM(right)),
                T(TernaryMul(left[0][0], right[0][0], right[-1][1])),
                T(TernaryAdd(l_cost, r_cost, agg)),
            ]
            if best_cost is not None:
                thoughts.append(T(Compare(cost, best_cost)))
            # 동점이면 앞쪽 분할 유지
            if best_cost is None or cost < best_cost:
                best_order, best_cost = (l_order, r_order), cost
            if len(right) > 1:
                thoughts.append(_tail(MCM(mats, split + 1, best_order, best_cost)))
            return thoughts

        case MergeSort(items):
            if len(items) < 2:
                return []
            l_len = (len(items) + 1) // 2
            left, right = items[:l_len], items[l_len:]
            return [T(MergeSort(left)), T(MergeSort(right)),
                    _tail(Merge(tuple(sorted(left)), tuple(sorted(right))))]

        case Merge(left, right):
            if not left or not right:
                return []
            thoughts = [T(Compare(left[0], right[0]))]
            if left[0] < right[0] and len(left) > 1:
                thoughts.append(T(Merge(left[1:], right)))
            elif left[0] >= right[0] and len(right) > 1:
                thoughts.append(T(Merge(left, right[1:])))
            return thoughts

    raise TypeError(f"Unknown problem type: {type(p).__name__}")


def combine(p: Problem, thoughts, answers):
    """하위 답(answers, thoughts 와 같은 순서)으로부터 p 의 답을 만든다."""
    if thoughts and thoughts[-1].is_tail:
        return answers[-1]

    match p:
        case Add(a, b):
            if not thoughts:
                return a + b
            last = answers[0]
            l_rest, r_rest = a // 10, b // 10
            idx = 1
            if last >= 10:
                l_rest = answers[idx]
                idx += 1
            rest = answers[idx] if l_rest > 0 and r_rest > 0 else l_rest + r_rest
            return rest * 10 + last % 10

        case Sub(a, b):
            if not thoughts:
                return a - b
            diff = answers[0]
            l_rest, r_rest = a // 10, b // 10
            idx = 1
            if diff < 10:
                l_rest = answers[idx]
                idx += 1
            rest = answers[idx] if r_rest > 0 else l_rest
            return rest * 10 + diff % 10

        case Mul(a, b):
            return a * b

        case Compare(a, b):
            if not thoughts:
                return compare_values(a, b)
            if answers[0] is not Ordering.EQ or len(answers) == 1:
                return answers[0]
            return answers[1]

        case Equal(a, b):
            return a == b

        case Div(a, b):
            if len(thoughts) == 1:
                return (1, 0) if answers[0] is Ordering.EQ else (0, a)
            if isinstance(thoughts[2].problem, Sub):
                quotient, remainder = answers[3]
                return quotient + 1, remainder
            high, _ = answers[2]
            low, remainder = answers[3]
            return high * 10 + low, remainder

        case LCS(left, right):
            if not thoughts:
                return "", 0
            if answers[0]:
                sub, length = answers[1]
                return sub + left[-1], length + 1
            return answers[1] if answers[3] is not Ordering.LT else answers[2]

        case LPS(seq):
            if len(seq) == 1:
                return seq, 1
            if len(seq) == 2:
                return (seq, 2) if answers[0] else (seq[0], 1)
            if answers[0]:
                inner, _ = answers[1]
                return seq[0] + inner + seq[-1], answers[2]
            return answers[1] if answers[3] is not Ordering.LT else answers[2]

        case Knapsack(items, capacity):
            item = items[0]
            if len(items) == 1:
                return ((item,), item[0]) if answers[0] is not Ordering.GT else ((), 0)
            excluded = answers[0]
            if answers[1] is Ordering.GT:
                return excluded
            sub_items, _ = answers[3]
            if answers[5] is Ordering.GT:
                return (item,) + sub_items, answers[4]
            return excluded

        case MCM(mats, split, best_order, best_cost):
            if not thoughts:
                return mats[0], 0
            (l_order, _), (r_order, _) = answers[0], answers[1]
            cost = answers[3]
            if best_cost is None or answers[4] is Ordering.LT:
                return (l_order, r_order), cost
            return best_order, best_cost

        case MergeSort(items):
            return tuple(items)

        case Merge(left, right):
            if not thoughts:
                return left + right
            if answers[0] is Ordering.LT:
                rest = answers[1] if len(thoughts) > 1 else right
                return (left[0],) + rest
            rest = answers[1] if len(thoughts) > 1 else left
            return (right[0],) + rest

    raise TypeError(f"Unknown problem type: {type(p).__name__}")


class Solver:
    """thought/answer 메모이제이션. 같은 하위 문제는 한 번만 푼다."""

    def __init__(self, max_depth: int = DEFAULT_MAX_DEPTH):
        self.max_depth = max_depth
        self._answers: dict = {}
        self._thoughts: dict = {}

    def __len__(self):
        return len(self._answers)

    def clear(self):
        self._answers.clear()
        self._thoughts.clear()

    def _lookup(self, problem):
        try:
            return self._answers[problem]
        except KeyError:
            raise _Pending(problem) from None

    def answer(self, problem: Problem):
        if problem in self._answers:
            return self._answers[problem]
        stack = [problem]
        while stack:
            if len(stack) > self.max_depth:
                raise RecursionGuardError(
                    f"Recursion guard tripped at depth {len(stack)} while solving {problem!r}"
                )
            top = stack[-1]
            if top in self._answers:
                stack.pop()
                continue
            thoughts = self._thoughts.get(top)
            if thoughts is None:
                try:
                    thoughts = tuple(decompose(top, self._lookup))
                except _Pending as pending:
                    stack.append(pending.problem)
                    continue
                self._thoughts[top] = thoughts
            missing = next((t.problem for t in thoughts if t.problem not in self._answers), None)
            if missing is not None:
                stack.append(missing)
                continue
            answers = [self._answers[t.problem] for t in thoughts]
            self._answers[top] = combine(top, thoughts, answers)
            stack.pop()
        return self._answers[problem]

    def thoughts(self, problem: Problem) -> tuple[Thought, ...]:
        if problem not in self._thoughts:
            self.answer(problem)
        return self._thoughts[problem]


# 모듈 기본 메모의 크기 상한. 넘으면 다음 호출 전에 비운다
CACHE_LIMIT = 200_000

_default_solver = Solver()


def _solver(solver):
    if solver is not None:
        return solver
    if len(_default_solver) > CACHE_LIMIT:
        _default_solver.clear()
    return _default_solver


def thought(p: Problem, solver: Solver = None) -> list[Thought]:
    return list(_solver(solver).thoughts(p))


def recursive_answer(p: Problem, solver: Solver = None):
    return _solver(solver).answer(p)
