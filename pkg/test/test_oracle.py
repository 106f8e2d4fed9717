import pytest

import models.OraclePredictor as oracle_module
from models.OraclePredictor import OraclePredictor
from modules.contexts import ThoughtType, build_target
from modules.errors import OracleParseError
from modules.problems import Add, Mul, sample_problems
from modules.rendering import render_question
from modules.tokens import Token, tokenize


def test_next_token_follows_target_and_context(builder):
    oracle = OraclePredictor(builder=builder)
    context = builder.rot_tree(Add(40, 35))
    target = build_target(context)
    for i in range(7, len(context.tokens)):
        expected = target[i] if target[i] is not Token.PAD else context.tokens[i]
        assert oracle.next_token(context.tokens[:i]) is expected


def test_predict_all_matches_shifted_target(builder):
    oracle = OraclePredictor(builder=builder)
    context = builder.rot_tree(Mul(34, 5))
    target = build_target(context)
    predictions = oracle.predict_all(context.tokens[:-1])
    for j, predicted in enumerate(predictions):
        if target[j + 1] is not Token.PAD:
            assert predicted is target[j + 1]


def test_cot_oracle_emits_single_context(builder):
    oracle = OraclePredictor(ThoughtType.COT, builder=builder)
    assert oracle.next_token(tokenize("GO40+35=")) is Token.GO
    assert oracle.next_token(tokenize("GO40+35=GO0+5=5STOP")) is Token.GO
    assert oracle.next_token(tokenize("GO40+35=GO0+5=5STOP GO4+3=7STOP 75")) is Token.STOP


def test_oracle_rejects_unparseable_contexts(builder):
    oracle = OraclePredictor(builder=builder)
    with pytest.raises(OracleParseError):
        oracle.next_token(tokenize("GO40+35"))
    with pytest.raises(OracleParseError):
        oracle.next_token(tokenize("GO LCS LCS="))
    with pytest.raises(OracleParseError):
        oracle.next_token(tokenize("GO40+35=GO9"))


def test_answer_cache_is_bounded(monkeypatch):
    monkeypatch.setattr(oracle_module, "CACHE_LIMIT", 20)
    oracle = OraclePredictor()
    for problem in sample_problems("add", 6, 100, seed=2):
        question = render_question(problem)
        assert oracle.next_token(question) is oracle.builder.rot_tree(problem).tokens[len(question)]
        assert len(oracle._cache) <= 20
