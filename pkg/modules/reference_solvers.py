"""재귀 분해와 독립적인 정답 계산기 (표 기반 DP).

동점 처리 규칙은 thoughts.py 의 분해 절차와 같다:
LCS/LPS 는 길이가 같으면 첫 번째 분기, Knapsack 은 가치가 같으면 제외 분기,
MCM 은 비용이 같으면 앞쪽 분할을 유지한다.
"""
from modules.problems import (
    LCS, LPS, MCM, Add, Compare, Div, Equal, Knapsack, Merge, MergeSort, Mul,
    Problem, Sub, TernaryAdd, TernaryMul, compare_values,
)


def lcs_table(left: str, right: str) -> tuple[str, int]:
    rows, cols = len(left), len(right)
    dp = [[""] * (cols + 1) for _ in range(rows + 1)]
    for i in range(1, rows + 1):
        for j in range(1, cols + 1):
            if left[i - 1] == right[j - 1]:
                dp[i][j] = dp[i - 1][j - 1] + left[i - 1]
            elif len(dp[i - 1][j]) >= len(dp[i][j - 1]):
                dp[i][j] = dp[i - 1][j]
            else:
                dp[i][j] = dp[i][j - 1]
    best = dp[rows][cols]
    return best, len(best)


def lps_table(seq: str) -> tuple[str, int]:
    n = len(seq)
    # dp[i][j]: seq[i:j] 의 LPS
    dp = [[""] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        dp[i][i + 1] = seq[i]
    for length in range(2, n + 1):
        for i in range(n - length + 1):
            j = i + length
            if seq[i] == seq[j - 1]:
                inner = dp[i + 1][j - 1] if length > 2 else ""
                dp[i][j] = seq[i] + inner + seq[j - 1]
            elif length == 2:
                dp[i][j] = seq[i]
            elif len(dp[i][j - 1]) >= len(dp[i + 1][j]):
                dp[i][j] = dp[i][j - 1]
            else:
                dp[i][j] = dp[i + 1][j]
    best = dp[0][n]
    return best, len(best)


def knapsack_table(items, capacity: int):
    n = len(items)
    # best[c]: items[i:] 로 용량 c 를 채운 (선택 아이템, 총 가치)
    value, weight = items[-1]
    best = [((items[-1],), value) if weight <= c else ((), 0) for c in range(capacity + 1)]
    for i in range(n - 2, -1, -1):
        value, weight = items[i]
        current = []
        for c in range(capacity + 1):
            excluded = best[c]
            if weight <= c:
                sub_items, sub_value = best[c - weight]
                if sub_value + value > excluded[1]:
                    current.append(((items[i],) + sub_items, sub_value + value))
                    continue
            current.append(excluded)
        best = current
    return best[capacity]


def mcm_interval_table(mats):
    """opt[(i, j)] = mats[i:j] 의 (최적 순서, 최소 비용)"""
    n = len(mats)
    opt = {(i, i + 1): (mats[i], 0) for i in range(n)}
    for length in range(2, n + 1):
        for i in range(n - length + 1):
            j = i + length
            best = None
            for k in range(i + 1, j):
                left_order, left_cost = opt[(i, k)]
                right_order, right_cost = opt[(k, j)]
                cost = left_cost + right_cost + mats[i][0] * mats[k][0] * mats[j - 1][1]
                if best is None or cost < best[1]:
                    best = ((left_order, right_order), cost)
            opt[(i, j)] = best
    return opt


def mcm_answer(p: MCM):
    n = len(p.mats)
    opt = mcm_interval_table(p.mats)
    if p.split is None:
        return opt[(0, n)]
    best = None if p.best_cost is None else (p.best_order, p.best_cost)
    for k in range(p.split, n):
        left_order, left_cost = opt[(0, k)]
        right_order, right_cost = opt[(k, n)]
        cost = left_cost + right_cost + p.mats[0][0] * p.mats[k][0] * p.mats[-1][1]
        if best is None or cost < best[1]:
            best = ((left_order, right_order), cost)
    return best


def direct_answer(p: Problem):
    match p:
        case Add(a, b):
            return a + b
        case Sub(a, b):
            return a - b
        case Mul(a, b):
            return a * b
        case Div(a, b):
            return divmod(a, b)
        case Compare(a, b):
            return compare_values(a, b)
        case Equal(a, b):
            return a == b
        case TernaryAdd(a, b, c):
            return a + b + c
        case TernaryMul(a, b, c):
            return a * b * c
        case LCS(left, right):
            return lcs_table(left, right)
        case LPS(seq):
            return lps_table(seq)
        case Knapsack(items, capacity):
            return knapsack_table(items, capacity)
        case MCM():
            return mcm_answer(p)
        case MergeSort(items):
            return tuple(sorted(items))
        case Merge(left, right):
            return tuple(sorted(left + right))
    raise TypeError(f"Unknown problem type: {type(p).__name__}")
