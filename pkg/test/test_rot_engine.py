import pytest

from models.OraclePredictor import OraclePredictor
from models.Predictor import Predictor
from modules.contexts import ContextBuilder
from modules.errors import BudgetExceeded, ContextOverflow, DepthExceeded, ProtocolViolation
from modules.problems import Add, Mul, TernaryAdd, sample_problems
from modules.rendering import render_answer, render_question
from modules.rot_engine import InferenceLimits, rot_infer
from modules.tokens import Token, tokenize


class ScriptedPredictor(Predictor):
    """컨텍스트와 무관하게 정해진 토큰을 순서대로 내는 모델"""

    max_context = 2048

    def __init__(self, tokens):
        self.tokens = list(tokens)

    def next_token(self, context):
        return self.tokens.pop(0) if self.tokens else Token.STOP


@pytest.fixture
def oracle(builder):
    return OraclePredictor(builder=builder)


def test_addition_reproduces_every_context(builder, oracle):
    answer, trace = rot_infer(oracle, render_question(Add(408, 351)), keep_transcripts=10)
    assert answer == tokenize("759STOP")
    assert trace.contexts_created == 5
    assert trace.max_depth == 2
    assert [tokens for _, _, tokens in trace.transcripts] == [c.tokens for c in builder.unique_contexts(Add(408, 351))]
    assert [depth for _, depth, _ in trace.transcripts] == [0, 1, 1, 2, 2]


def test_tail_call_keeps_depth(builder, oracle):
    answer, trace = rot_infer(oracle, render_question(Mul(34, 5)), keep_transcripts=10)
    assert answer == tokenize("170STOP")
    assert trace.contexts_created == 7
    assert trace.max_depth == 2
    # 꼬리 호출로 교체된 루트는 THINK 로 끝난 채 기록된다
    assert trace.transcripts[0][2] == tokenize("GO34*5=GO4*5=20STOP GO3*5=15STOP TAIL150+20=THINK")
    assert trace.transcripts[3][2] == tokenize("GO150+20=GO0+0=0STOP GO15+2=17STOP 170STOP")


def test_think_tokens_counted(oracle):
    _, trace = rot_infer(oracle, render_question(TernaryAdd(12, 34, 56)))
    assert trace.think_tokens == trace.contexts_created - 1


@pytest.mark.parametrize("task,difficulty", [
    ("add", 8), ("sub", 8), ("mul", 3), ("div", 3), ("lcs", 4), ("lps", 5),
    ("knapsack", 3), ("mcm", 3), ("sort", 5), ("merge", 5), ("ternary_mul", 2), ("compare", 6),
])
def test_oracle_end_to_end(builder, oracle, task, difficulty):
    for problem in sample_problems(task, difficulty, 30, seed=0):
        answer, trace = rot_infer(oracle, render_question(problem))
        assert answer == render_answer(problem, builder.answer(problem))
        assert trace.max_depth <= trace.contexts_created


def test_question_must_start_with_go(oracle):
    with pytest.raises(ProtocolViolation):
        rot_infer(oracle, tokenize("40+35="))


def test_depth_limit(oracle):
    with pytest.raises(DepthExceeded) as info:
        rot_infer(oracle, render_question(Add(408, 351)), InferenceLimits(max_depth=1))
    assert info.value.trace.max_depth == 1


def test_context_limit(oracle):
    with pytest.raises(ContextOverflow):
        rot_infer(oracle, render_question(Add(408, 351)), InferenceLimits(max_context_tokens=12))


def test_token_budget(oracle):
    with pytest.raises(BudgetExceeded):
        rot_infer(oracle, render_question(Add(408, 351)), InferenceLimits(max_total_tokens=5))


def test_think_without_open_question_is_a_protocol_violation():
    with pytest.raises(ProtocolViolation):
        rot_infer(ScriptedPredictor([Token.THINK]), tokenize("GO1+2="))


def test_pad_output_is_a_protocol_violation():
    with pytest.raises(ProtocolViolation):
        rot_infer(ScriptedPredictor([Token.PAD]), tokenize("GO1+2="))


def test_scripted_recursion_splices_sub_answer():
    # 루트: GO 1+2= THINK -> 자식: 3 STOP -> 루트: 3 STOP
    model = ScriptedPredictor([Token.GO, *tokenize("1+2="), Token.THINK, *tokenize("3STOP"), *tokenize("3STOP")])
    answer, trace = rot_infer(model, tokenize("GO1+2="), keep_transcripts=2)
    assert answer == tokenize("3STOP")
    assert trace.contexts_created == 2
    assert trace.transcripts[0][2] == tokenize("GO1+2=GO1+2=3STOP 3STOP")
    assert trace.transcripts[1][2] == tokenize("GO1+2=3STOP")


def test_long_addition_does_not_hit_host_recursion():
    builder = ContextBuilder()
    oracle = OraclePredictor(builder=builder)
    problem = Add(int("9" * 64), 1)
    answer, trace = rot_infer(oracle, render_question(problem))
    assert answer == render_answer(problem, 10 ** 64)
    assert trace.max_depth == 63


def test_second_think_needs_a_new_question():
    # 하위 답을 끼워 넣은 뒤 GO 없이 다시 THINK 를 내면 이전 질문을 재사용하지 않는다
    model = ScriptedPredictor([Token.GO, *tokenize("1+2="), Token.THINK, *tokenize("3STOP"), Token.THINK])
    with pytest.raises(ProtocolViolation, match="THINK without an open GO/TAIL"):
        rot_infer(model, tokenize("GO1+2="))
