"""중복 제거 기반 RoT 평가.

테스트 셋 전체에서 고유 컨텍스트만 모아 teacher forcing 으로 한 번씩 검사하고,
문제는 자신이 의존하는 모든 고유 컨텍스트가 통과했을 때만 정답으로 본다.
"""
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Hashable, Optional

from tqdm import tqdm

from modules.contexts import Context, ContextBuilder, ThoughtType, build_target
from modules.errors import InferenceError, RotLabError
from modules.rendering import render_answer, render_question
from modules.rot_engine import InferenceLimits, rot_infer
from modules.tokens import Token, TokenSeq, to_text

OVERFLOW = "ContextOverflow"


@dataclass(frozen=True)
class ContextItem:
    key: Hashable
    context: Optional[Context]
    target: Optional[TokenSeq]
    length: int

    @property
    def label(self) -> str:
        if self.context is None:
            return f"<{self.length} tokens> {to_text(self.key[1])}"
        return to_text(self.key)


@dataclass(frozen=True)
class ContextVerdict:
    passed: bool
    reason: Optional[str] = None


@dataclass
class EvalReport:
    context_verdicts: dict = field(default_factory=dict)
    problem_verdicts: list = field(default_factory=list)
    accuracy: float = 0.0
    unique_contexts: int = 0
    total_contexts: int = 0
    labels: dict = field(default_factory=dict)

    @property
    def correct(self) -> int:
        return sum(self.problem_verdicts)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "problems": len(self.problem_verdicts),
            "correct": self.correct,
            "unique_contexts": self.unique_contexts,
            "total_contexts": self.total_contexts,
            "problem_verdicts": self.problem_verdicts,
            "context_verdicts": [
                {"context": self.labels.get(key, str(key)), "passed": verdict.passed, "reason": verdict.reason}
                for key, verdict in self.context_verdicts.items()
            ],
        }


def _tree_size(root: Context) -> int:
    """중복 제거 전 트리의 컨텍스트 인스턴스 수 (DAG 위에서 계산)"""
    memo: dict[int, int] = {}
    stack = [root]
    while stack:
        c = stack[-1]
        if id(c) in memo:
            stack.pop()
            continue
        pending = [child for child in c.children if id(child) not in memo]
        if pending:
            stack.extend(pending)
            continue
        memo[id(c)] = 1 + sum(memo[id(child)] for child in c.children)
        stack.pop()
    return memo[id(root)]


def collect_unique_contexts(problems, builder: ContextBuilder = None, thought_type=ThoughtType.ROT,
                            max_context: int = None):
    """(고유 컨텍스트 dict, 문제별 의존 키 목록, 중복 제거 전 컨텍스트 수)

    CoT 컨텍스트가 max_context 를 넘으면 펼치지 않고 길이만 기록한다.
    """
    builder = ContextBuilder() if builder is None else builder
    thought_type = ThoughtType(thought_type)
    unique: dict[Hashable, ContextItem] = {}
    membership: list[list[Hashable]] = []
    total = 0
    for problem in problems:
        keys = []
        if thought_type is ThoughtType.COT and max_context is not None:
            length = builder.cot_length(problem)
            if length > max_context:
                key = (OVERFLOW, render_question(problem))
                unique.setdefault(key, ContextItem(key, None, None, length))
                membership.append([key])
                total += 1
                continue
        for context in builder.training_contexts(problem, thought_type):
            key = context.key
            if key not in unique:
                unique[key] = ContextItem(key, context, build_target(context), len(context))
            keys.append(key)
        total += _tree_size(builder.rot_tree(problem)) if thought_type is ThoughtType.ROT else 1
        membership.append(keys)
    return unique, membership, total


def evaluate_context(model, context: Context, target: TokenSeq) -> ContextVerdict:
    tokens = context.tokens
    if len(tokens) > model.max_context:
        return ContextVerdict(False, OVERFLOW)
    try:
        predictions = model.predict_all(tokens[:-1])
    except RotLabError as e:
        return ContextVerdict(False, f"{type(e).__name__}: {e}")
    for j, predicted in enumerate(predictions):
        expected = target[j + 1]
        if expected is not Token.PAD and predicted is not expected:
            return ContextVerdict(False, f"position {j + 1}: expected {expected.text}, got {predicted.text}")
    return ContextVerdict(True)


def _evaluate_item(model, item: ContextItem) -> ContextVerdict:
    if item.context is None:
        return ContextVerdict(False, OVERFLOW)
    return evaluate_context(model, item.context, item.target)


def aggregate(verdicts: dict, membership, total_contexts: int = None, labels: dict = None) -> EvalReport:
    problem_verdicts = [all(verdicts[key].passed for key in keys) for keys in membership]
    accuracy = sum(problem_verdicts) / len(problem_verdicts) if problem_verdicts else 0.0
    return EvalReport(
        context_verdicts=dict(verdicts),
        problem_verdicts=problem_verdicts,
        accuracy=accuracy,
        unique_contexts=len(verdicts),
        total_contexts=total_contexts if total_contexts is not None else sum(len(keys) for keys in membership),
        labels=labels or {},
    )


def evaluate_problems(model, problems, builder: ContextBuilder = None, thought_type=ThoughtType.ROT,
                      workers: int = 1, progress: bool = False, desc: str = "evaluate") -> EvalReport:
    unique, membership, total = collect_unique_contexts(
        problems, builder, thought_type, max_context=model.max_context)
    verdicts: dict[Hashable, ContextVerdict] = {}
    if workers <= 1:
        items = tqdm(unique.values(), desc=desc, leave=False) if progress else unique.values()
        for item in items:
            verdicts[item.key] = _evaluate_item(model, item)
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(_evaluate_item, model, item): item.key for item in unique.values()}
            completed = as_completed(futures)
            if progress:
                completed = tqdm(completed, total=len(futures), desc=desc, leave=False)
            for future in completed:
                verdicts[futures[future]] = future.result()
    # 완료 순서와 무관하게 수집 순서로 정렬
    ordered = {key: verdicts[key] for key in unique}
    labels = {key: item.label for key, item in unique.items()}
    return aggregate(ordered, membership, total, labels)


def naive_evaluate(model, problems, builder: ContextBuilder = None) -> list[bool]:
    """캐시 없이 문제마다 트리의 모든 컨텍스트 인스턴스를 검사 (동치성 확인용)"""
    builder = ContextBuilder() if builder is None else builder
    verdicts = []
    for problem in problems:
        ok = True
        stack = [builder.rot_tree(problem)]
        while stack and ok:
            context = stack.pop()
            ok = evaluate_context(model, context, build_target(context)).passed
            stack.extend(context.children)
        verdicts.append(ok)
    return verdicts


def infer_problem(model, problem, builder: ContextBuilder, limits: InferenceLimits = None,
                  keep_transcripts: int = 0) -> dict:
    """rot_infer 로 끝까지 풀어 정답과 비교한 결과"""
    question = render_question(problem)
    expected = render_answer(problem, builder.answer(problem))
    limits = limits or InferenceLimits()
    model_limit = getattr(model, "max_context", None)
    if model_limit is not None and model_limit < limits.max_context_tokens:
        limits = limits.model_copy(update={"max_context_tokens": model_limit})
    try:
        answer, trace = rot_infer(model, question, limits, keep_transcripts=keep_transcripts)
    except InferenceError as e:
        return {"question": to_text(question), "correct": False, "error": f"{type(e).__name__}: {e}",
                "trace": e.trace.to_dict() if e.trace is not None else None}
    return {"question": to_text(question), "answer": to_text(answer), "expected": to_text(expected),
            "correct": answer == expected, "trace": trace.to_dict()}
