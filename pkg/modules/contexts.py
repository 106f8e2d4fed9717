"""RoT 컨텍스트 트리, 학습 타깃, CoT/WT 베이스라인 시퀀스 생성.

트리는 문제 단위로 메모이즈된 DAG 로 만든다. LCS 처럼 같은 하위 문제가
지수적으로 반복되는 경우에도 노드 수는 서로 다른 하위 문제 수에 비례한다.
CoT 길이와 토큰 수도 같은 DAG 위에서 세므로 실제로 펼칠 수 없는 크기도 정확히 계산된다.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from modules.errors import ContextOverflow
from modules.problems import Problem
from modules.rendering import render_answer, render_question
from modules.thoughts import CACHE_LIMIT, Solver
from modules.tokens import Token, TokenSeq


class ThoughtType(str, Enum):
    WT = "wt"
    COT = "cot"
    ROT = "rot"


@dataclass(frozen=True, eq=False)
class Context:
    problem: Problem
    question: TokenSeq
    sub_pairs: tuple[tuple[TokenSeq, TokenSeq], ...]
    # 마지막 쌍이 꼬리 호출이면 None
    answer: Optional[TokenSeq]
    children: tuple["Context", ...]
    tokens: TokenSeq

    @property
    def key(self) -> TokenSeq:
        return self.tokens

    @property
    def is_base(self) -> bool:
        return not self.sub_pairs

    @property
    def generated_tokens(self) -> int:
        """이 컨텍스트에서 모델이 직접 생성하는 토큰 수 (THINK 제외)"""
        return sum(len(q) for q, _ in self.sub_pairs) + len(self.answer or ())

    def __len__(self):
        return len(self.tokens)


def flat_context(problem: Problem, question: TokenSeq, rest: TokenSeq) -> Context:
    """중간 호출이 없는 단일 컨텍스트 (WT, CoT 베이스라인)"""
    return Context(problem, tuple(question), (), tuple(rest), (), tuple(question) + tuple(rest))


def build_target(c: Context) -> TokenSeq:
    target = [Token.PAD] * len(c.question)
    for sub_question, sub_answer in c.sub_pairs:
        target.extend(sub_question)
        target.append(Token.THINK)
        target.extend([Token.PAD] * (len(sub_answer) - 1))
    if c.answer is not None:
        target.extend(c.answer)
    return tuple(target)


class ContextBuilder:
    def __init__(self, solver: Solver = None):
        self.solver = Solver() if solver is None else solver
        self._contexts: dict[Problem, Context] = {}

    def clear(self):
        self._contexts.clear()
        self.solver.clear()

    def cache_size(self) -> int:
        return len(self._contexts) + len(self.solver)

    def answer(self, problem: Problem):
        return self.solver.answer(problem)

    def _assemble(self, problem: Problem, thoughts) -> Context:
        question = render_question(problem)
        pairs = []
        for t in thoughts:
            sub_question = render_question(t.problem, tail=t.is_tail)
            if t.is_tail:
                # 꼬리 호출의 답은 부모 컨텍스트로 돌아오지 않는다
                sub_answer = (Token.THINK,)
            else:
                sub_answer = render_answer(t.problem, self.solver.answer(t.problem))
            pairs.append((sub_question, sub_answer))
        tail_ended = bool(thoughts) and thoughts[-1].is_tail
        answer = None if tail_ended else render_answer(problem, self.solver.answer(problem))
        tokens = list(question)
        for sub_question, sub_answer in pairs:
            tokens.extend(sub_question)
            tokens.extend(sub_answer)
        if answer is not None:
            tokens.extend(answer)
        children = tuple(self._contexts[t.problem] for t in thoughts)
        return Context(problem, question, tuple(pairs), answer, children, tuple(tokens))

    def rot_tree(self, problem: Problem) -> Context:
        if problem in self._contexts:
            return self._contexts[problem]
        self.solver.answer(problem)
        stack = [problem]
        while stack:
            top = stack[-1]
            if top in self._contexts:
                stack.pop()
                continue
            thoughts = self.solver.thoughts(top)
            pending = next((t.problem for t in thoughts if t.problem not in self._contexts), None)
            if pending is not None:
                stack.append(pending)
                continue
            self._contexts[top] = self._assemble(top, thoughts)
            stack.pop()
        return self._contexts[problem]

    def unique_contexts(self, problem: Problem) -> list[Context]:
        """트리의 고유 컨텍스트를 생성 순서(전위 순회)대로 반환"""
        root = self.rot_tree(problem)
        visited, seen, ordered = set(), set(), []
        stack = [root]
        while stack:
            c = stack.pop()
            if id(c) in visited:
                continue
            visited.add(id(c))
            if c.tokens in seen:
                continue
            seen.add(c.tokens)
            ordered.append(c)
            stack.extend(reversed(c.children))
        return ordered

    def _fold(self, root: Context, fn) -> int:
        """DAG 후위 순회 집계: value(c) = fn(c, [value(child) ...])"""
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
            memo[id(c)] = fn(c, [memo[id(child)] for child in c.children])
            stack.pop()
        return memo[id(root)]

    def naive_generated_tokens(self, problem: Problem) -> int:
        """캐시 없이 트리 전체를 추론할 때 생성하는 토큰 수 (THINK 제외)"""
        return self._fold(self.rot_tree(problem), lambda c, sub: c.generated_tokens + sum(sub))

    def cached_generated_tokens(self, problem: Problem) -> int:
        """중복 컨텍스트를 한 번씩만 추론할 때의 토큰 수"""
        return sum(c.generated_tokens for c in self.unique_contexts(problem))

    def cot_length(self, problem: Problem) -> int:
        root = self.rot_tree(problem)
        rest = self._fold(root, lambda c, sub: sum(len(q) for q, _ in c.sub_pairs) + sum(sub) + len(c.answer or ()))
        return len(root.question) + rest

    def cot_tokens(self, problem: Problem, max_tokens: int = None) -> TokenSeq:
        if max_tokens is not None:
            length = self.cot_length(problem)
            if length > max_tokens:
                raise ContextOverflow(f"CoT context of {length} tokens exceeds the limit {max_tokens}")
        root = self.rot_tree(problem)
        out = list(root.question)
        stack = [(root, 0)]
        while stack:
            c, i = stack.pop()
            if i < len(c.sub_pairs):
                stack.append((c, i + 1))
                out.extend(c.sub_pairs[i][0])
                stack.append((c.children[i], 0))
            elif c.answer is not None:
                out.extend(c.answer)
        return tuple(out)

    def max_rot_length(self, problem: Problem) -> int:
        return max(len(c) for c in self.unique_contexts(problem))

    def wt_pair(self, problem: Problem) -> tuple[TokenSeq, TokenSeq]:
        return render_question(problem), render_answer(problem, self.solver.answer(problem))

    def training_contexts(self, problem: Problem, thought_type: ThoughtType, max_tokens: int = None) -> list[Context]:
        """thought_type 별 학습/평가 대상 컨텍스트 목록"""
        thought_type = ThoughtType(thought_type)
        if thought_type is ThoughtType.ROT:
            return self.unique_contexts(problem)
        question = render_question(problem)
        if thought_type is ThoughtType.WT:
            _, answer = self.wt_pair(problem)
            return [flat_context(problem, question, answer)]
        cot = self.cot_tokens(problem, max_tokens=max_tokens)
        return [flat_context(problem, question, cot[len(question):])]


_default_builder = ContextBuilder()


def _builder(builder):
    if builder is not None:
        return builder
    if _default_builder.cache_size() > CACHE_LIMIT:
        _default_builder.clear()
    return _default_builder


def build_rot_tree(p: Problem, builder: ContextBuilder = None) -> Context:
    return _builder(builder).rot_tree(p)


def build_cot_context(p: Problem, builder: ContextBuilder = None, max_tokens: int = None) -> TokenSeq:
    return _builder(builder).cot_tokens(p, max_tokens=max_tokens)


def build_wt_pair(p: Problem, builder: ContextBuilder = None) -> tuple[TokenSeq, TokenSeq]:
    return _builder(builder).wt_pair(p)


def sample_training_context(p: Problem, rng: np.random.Generator, builder: ContextBuilder = None,
                            thought_type: ThoughtType = ThoughtType.ROT) -> tuple[Context, TokenSeq]:
    candidates = _builder(builder).training_contexts(p, thought_type)
    context = candidates[int(rng.integers(len(candidates)))]
    return context, build_target(context)
