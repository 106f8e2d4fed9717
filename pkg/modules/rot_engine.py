"""다중 컨텍스트 재귀 추론 루프.

모델이 GO/TAIL 로 하위 질문을 열고 THINK 로 재귀를 요청하면 새 컨텍스트를 만들고,
하위 컨텍스트가 STOP 으로 끝나면 그 답을 부모의 THINK 자리에 끼워 넣는다.
호스트 재귀 대신 프레임 스택을 쓰며, 꼬리 호출은 현재 프레임을 자식 프레임으로
교체(trampoline)하므로 꼬리 호출 사슬이 길어도 깊이가 늘지 않는다.
"""
from dataclasses import dataclass, field
from typing import Optional

from pydantic import BaseModel, PositiveInt

from modules.errors import BudgetExceeded, ContextOverflow, DepthExceeded, ProtocolViolation
from modules.tokens import Token, TokenSeq, to_text


class InferenceLimits(BaseModel):
    max_context_tokens: PositiveInt = 2048
    max_depth: PositiveInt = 1000
    max_total_tokens: PositiveInt = 10_000_000


@dataclass
class RotTrace:
    contexts_created: int = 0
    max_depth: int = 0
    tokens_generated: int = 0
    think_tokens: int = 0
    # 생성 순서대로 보관되는 컨텍스트 기록 (keep_transcripts 개까지)
    transcripts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "contexts_created": self.contexts_created,
            "max_depth": self.max_depth,
            "tokens_generated": self.tokens_generated,
            "think_tokens": self.think_tokens,
            "transcripts": [
                {"index": index, "depth": depth, "context": to_text(tokens)}
                for index, depth, tokens in self.transcripts
            ],
        }


@dataclass
class _Frame:
    tokens: list
    index: int
    depth: int
    i_ans: int
    i_go: Optional[int] = None
    tail: bool = False


def rot_infer(model, question: TokenSeq, limits: InferenceLimits = None,
              keep_transcripts: int = 0) -> tuple[TokenSeq, RotTrace]:
    limits = limits or InferenceLimits()
    question = tuple(question)
    trace = RotTrace()
    if not question or question[0] is not Token.GO:
        raise ProtocolViolation("Question must begin with GO", trace)

    def open_frame(tokens, depth) -> _Frame:
        if len(tokens) > limits.max_context_tokens:
            raise ContextOverflow(
                f"Question of {len(tokens)} tokens exceeds max_context_tokens={limits.max_context_tokens}", trace)
        if depth > limits.max_depth:
            raise DepthExceeded(f"Recursion depth {depth} exceeds max_depth={limits.max_depth}", trace)
        frame = _Frame(tokens=list(tokens), index=trace.contexts_created, depth=depth, i_ans=len(tokens))
        trace.contexts_created += 1
        trace.max_depth = max(trace.max_depth, depth)
        if keep_transcripts > len(trace.transcripts):
            trace.transcripts.append((frame.index, depth, None))
        return frame

    def close_frame(frame: _Frame):
        if frame.index < keep_transcripts:
            for i, (index, depth, _) in enumerate(trace.transcripts):
                if index == frame.index:
                    trace.transcripts[i] = (index, depth, tuple(frame.tokens))
                    break

    stack = [open_frame(question, 0)]
    while True:
        frame = stack[-1]
        if trace.tokens_generated + trace.think_tokens >= limits.max_total_tokens:
            raise BudgetExceeded(f"Generated more than max_total_tokens={limits.max_total_tokens}", trace)
        x = model.next_token(tuple(frame.tokens))
        if x is Token.PAD:
            raise ProtocolViolation(f"Model emitted PAD in context {frame.index}", trace)
        if len(frame.tokens) + 1 > limits.max_context_tokens:
            raise ContextOverflow(
                f"Context {frame.index} would exceed max_context_tokens={limits.max_context_tokens}", trace)
        frame.tokens.append(x)

        if x is Token.THINK:
            trace.think_tokens += 1
            if frame.i_go is None:
                raise ProtocolViolation(f"THINK without an open GO/TAIL in context {frame.index}", trace)
            sub_question = frame.tokens[frame.i_go:-1]
            # 하위 컨텍스트는 항상 GO 로 시작
            sub_question[0] = Token.GO
            if frame.tail:
                close_frame(frame)
                stack[-1] = open_frame(sub_question, frame.depth)
            else:
                stack.append(open_frame(sub_question, frame.depth + 1))
            continue

        trace.tokens_generated += 1
        if x is Token.GO:
            frame.i_go = len(frame.tokens) - 1
        elif x is Token.TAIL:
            frame.i_go = len(frame.tokens) - 1
            frame.tail = True
        elif x is Token.STOP:
            answer = tuple(frame.tokens[frame.i_ans:])
            close_frame(frame)
            stack.pop()
            if not stack:
                return answer, trace
            parent = stack[-1]
            # THINK 를 하위 답으로 교체
            if len(parent.tokens) - 1 + len(answer) > limits.max_context_tokens:
                raise ContextOverflow(
                    f"Context {parent.index} would exceed max_context_tokens={limits.max_context_tokens}", trace)
            parent.tokens[-1:] = answer
            parent.i_ans = len(parent.tokens)
            # 다음 THINK 는 새 GO 뒤에서만 허용
            parent.i_go = None
