"""prompt/completion JSONL 변환 (외부 fine-tuning 용).

모든 토큰 앞에 공백 하나를 두고, 알파벳 토큰은 소문자 단어로,
숫자와 연산자는 그대로 쓴다.
"""
import json
from dataclasses import dataclass

from modules.contexts import Context, ContextBuilder, ThoughtType, build_target
from modules.errors import TokenParseError
from modules.tokens import Token, TokenSeq, token_from_text

_SEGMENT_END = (Token.THINK, Token.STOP)


@dataclass(frozen=True)
class PromptCompletionRecord:
    prompt: str
    completion: str

    def to_dict(self) -> dict:
        return {"prompt": self.prompt, "completion": self.completion}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


def export_word(token: Token) -> str:
    # 알파벳 토큰(제어, 단어, VS, R)은 소문자 단어로
    if token.text.isalpha():
        return token.text.lower()
    return token.text


def export_text(ts) -> str:
    return "".join(" " + export_word(t) for t in ts)


def parse_export_text(text: str) -> TokenSeq:
    tokens = []
    for word in text.split(" "):
        if not word:
            continue
        try:
            tokens.append(token_from_text(word.upper() if word.isalpha() else word))
        except TokenParseError:
            raise TokenParseError(f"Unknown export word {word!r} in {text!r}") from None
    return tuple(tokens)


def _next_generated(target: TokenSeq, start: int):
    for i in range(start, len(target)):
        if target[i] is not Token.PAD:
            return i
    return None


def derive_prompt_completions(c: Context, t: TokenSeq) -> list[PromptCompletionRecord]:
    """THINK/STOP 출력마다 하나씩: 그 직전까지의 컨텍스트 -> 생성 구간"""
    tokens = c.tokens
    records = []
    start = _next_generated(t, 0)
    while start is not None:
        end = start
        while end < len(t) - 1 and t[end] not in _SEGMENT_END:
            end += 1
        records.append(PromptCompletionRecord(export_text(tokens[:start]), export_text(t[start:end + 1])))
        start = _next_generated(t, end + 1)
    return records


def export_flat(question: TokenSeq, rest: TokenSeq) -> PromptCompletionRecord:
    """WT/CoT 는 문제당 한 레코드"""
    return PromptCompletionRecord(export_text(question), export_text(rest))


def export_records(problems, thought_type=ThoughtType.ROT, builder: ContextBuilder = None,
                   max_tokens: int = None, dedup: bool = True):
    """문제 목록을 레코드 스트림으로. RoT 는 고유 컨텍스트 단위로 중복 제거한다."""
    builder = ContextBuilder() if builder is None else builder
    thought_type = ThoughtType(thought_type)
    seen = set()
    for problem in problems:
        for context in builder.training_contexts(problem, thought_type, max_tokens=max_tokens):
            if dedup:
                if context.key in seen:
                    continue
                seen.add(context.key)
            if thought_type is ThoughtType.ROT:
                yield from derive_prompt_completions(context, build_target(context))
            else:
                yield export_flat(context.question, context.answer)
