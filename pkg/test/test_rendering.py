import numpy as np
import pytest

from modules.errors import TokenParseError
from modules.problems import MCM, TASKS, Knapsack, LCS, TernaryAdd, sample_problem
from modules.reference_solvers import direct_answer
from modules.rendering import parse_answer, parse_question, render_answer, render_question
from modules.tokens import Token, tokenize


def test_sampled_questions_parse_back():
    rng = np.random.default_rng(5)
    for task in TASKS:
        for _ in range(20):
            problem = sample_problem(task, 4, rng)
            assert parse_question(render_question(problem)) == problem
            answer = direct_answer(problem)
            assert parse_answer(problem, render_answer(problem, answer)) == answer


def test_tail_question_starts_with_tail():
    assert render_question(TernaryAdd(1, 2, 3), tail=True)[0] is Token.TAIL
    assert parse_question(tokenize("TAIL150+20=")).a == 150


def test_matrix_chain_intermediate_state():
    problem = parse_question(tokenize("GO MCM3×9,9×4|4×5ACC3×9,(9×4,4×5);315="))
    assert problem == MCM(((3, 9), (9, 4), (4, 5)), 2, ((3, 9), ((9, 4), (4, 5))), 315)
    assert render_question(problem) == tokenize("GO MCM3×9,9×4|4×5ACC3×9,(9×4,4×5);315=")


def test_empty_answers():
    assert render_answer(Knapsack(((9, 5),), 1), ((), 0)) == tokenize("$0STOP")
    assert render_answer(LCS("1", "234"), ("", 0)) == tokenize(";0STOP")
    assert parse_answer(Knapsack(((9, 5),), 1), tokenize("$0STOP")) == ((), 0)


def test_malformed_questions():
    for text in ["40+35", "GO40+=", "GO MCM3×9,8×4=", "GO40-50=", "GO1+2+3+4="]:
        with pytest.raises(TokenParseError):
            parse_question(tokenize(text))


def test_answer_requires_stop():
    with pytest.raises(TokenParseError):
        parse_answer(TernaryAdd(1, 2, 3), tokenize("6"))
