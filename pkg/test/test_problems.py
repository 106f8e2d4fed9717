import numpy as np
import pytest

from modules.errors import ConfigError
from modules.problems import (
    MCM, TASKS, Div, Knapsack, LogUniformParams, Merge, MergeSort, Sub, operand_params,
    sample_log_uniform, sample_problem, sample_problems,
)


def test_log_uniform_stays_in_range():
    rng = np.random.default_rng(0)
    params = LogUniformParams(0, 1000, 5)
    values = [sample_log_uniform(params, rng) for _ in range(5000)]
    assert min(values) >= 0 and max(values) <= 999


def test_log_uniform_digit_count_mass():
    # log(x + 3) 가 균등하므로 5자리 이상일 확률은 약 (8 - 4) / (8 - log10 3) = 0.532
    rng = np.random.default_rng(1)
    params = operand_params(8)
    values = np.array([sample_log_uniform(params, rng) for _ in range(20_000)])
    fraction = np.mean(values >= 10_000)
    assert 0.50 < fraction < 0.56


def test_log_uniform_large_operands_keep_full_width():
    rng = np.random.default_rng(2)
    values = [sample_log_uniform(operand_params(32), rng) for _ in range(1000)]
    assert all(0 <= v < 10 ** 32 for v in values)
    assert any(len(str(v)) == 32 for v in values)


def test_log_uniform_favours_small_values():
    # P(x <= 4) = (log 8 - log 3) / (log 13 - log 3) = 0.669
    rng = np.random.default_rng(4)
    values = np.array([sample_log_uniform(LogUniformParams(0, 10, 3), rng) for _ in range(10_000)])
    assert np.mean(values <= 4) > 0.5
    assert 0.64 < np.mean(values <= 4) < 0.70


def test_log_uniform_params_validation():
    with pytest.raises(ConfigError):
        LogUniformParams(10, 10)
    with pytest.raises(ConfigError):
        LogUniformParams(-5, 10, 3)


def test_every_task_samples():
    rng = np.random.default_rng(3)
    for task in TASKS:
        problem = sample_problem(task, 4, rng)
        assert problem.TASK == task


def test_sampler_rejects_bad_inputs():
    rng = np.random.default_rng(0)
    with pytest.raises(ConfigError):
        sample_problem("fibonacci", 3, rng)
    with pytest.raises(ConfigError):
        sample_problem("add", 0, rng)
    with pytest.raises(ConfigError):
        sample_problem("sort", 1, rng)


def test_sub_is_never_negative():
    for problem in sample_problems("sub", 6, 500, seed=0):
        assert isinstance(problem, Sub) and problem.a >= problem.b


def test_div_identity():
    for problem in sample_problems("div", 6, 500, seed=0):
        assert isinstance(problem, Div)
        quotient, remainder = divmod(problem.a, problem.b)
        assert problem.b >= 1
        assert problem.a == problem.b * quotient + remainder and 0 <= remainder < problem.b


def test_div_quotient_is_mostly_nonzero():
    problems = sample_problems("div", 6, 2000, seed=5)
    zero_quotients = sum(problem.a < problem.b for problem in problems)
    assert zero_quotients / len(problems) < 0.5


def test_knapsack_capacity_and_items():
    for problem in sample_problems("knapsack", 6, 300, seed=0):
        assert isinstance(problem, Knapsack) and len(problem.items) == 6
        assert all(1 <= v <= 99 and 1 <= w <= 99 for v, w in problem.items)
        assert 1 <= problem.capacity <= sum(w for _, w in problem.items)


def test_mcm_chain_is_valid():
    for problem in sample_problems("mcm", 4, 300, seed=0):
        assert isinstance(problem, MCM) and len(problem.mats) == 4 and problem.split is None
        assert all(1 <= d <= 99 for m in problem.mats for d in m)


def test_sort_and_merge_term_counts():
    for problem in sample_problems("sort", 8, 300, seed=0):
        assert isinstance(problem, MergeSort) and 2 <= len(problem.items) <= 8
        assert all(0 <= x < 1000 for x in problem.items)
    for problem in sample_problems("merge", 8, 300, seed=0):
        assert isinstance(problem, Merge)
        assert 2 <= len(problem.left) + len(problem.right) <= 8
        assert list(problem.left) == sorted(problem.left) and list(problem.right) == sorted(problem.right)


def test_sampling_is_reproducible():
    assert sample_problems("lcs", 8, 50, seed=7) == sample_problems("lcs", 8, 50, seed=7)
    assert sample_problems("lcs", 8, 50, seed=7) != sample_problems("lcs", 8, 50, seed=8)
    # index 별 스트림: 앞부분을 잘라 다시 뽑아도 같은 문제
    assert sample_problems("add", 4, 20, seed=1)[10:] == sample_problems("add", 4, 10, seed=1, offset=10)
    assert sample_problems("add", 4, 20, seed=1) != sample_problems("add", 4, 20, seed=1, purpose="train")


def test_invalid_constructions():
    with pytest.raises(ValueError):
        Sub(3, 5)
    with pytest.raises(ValueError):
        Div(3, 0)
    with pytest.raises(ValueError):
        MCM(((3, 9), (4, 5)))
