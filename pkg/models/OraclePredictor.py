import threading

from models.Predictor import Predictor
from modules.contexts import ContextBuilder, ThoughtType, build_target
from modules.errors import OracleParseError, TokenParseError
from modules.rendering import parse_question
from modules.thoughts import CACHE_LIMIT
from modules.tokens import Token, TokenSeq, to_text


class OraclePredictor(Predictor):
    """정답 분해 절차를 그대로 따르는 이상적인 모델.

    컨텍스트 앞부분의 질문을 파싱해 정답 컨텍스트와 타깃을 재구성하고,
    현재 위치의 타깃 토큰을 돌려준다. 하위 답이 들어갈 자리(타깃 PAD)는
    정답 컨텍스트의 토큰을 그대로 따라간다.
    """

    def __init__(self, thought_type=ThoughtType.ROT, max_context: int = 2048, builder: ContextBuilder = None):
        self.thought_type = ThoughtType(thought_type)
        self.max_context = max_context
        self.builder = ContextBuilder() if builder is None else builder
        self._cache: dict[TokenSeq, tuple[TokenSeq, TokenSeq]] = {}
        self._lock = threading.Lock()

    def _ground_truth(self, context: TokenSeq) -> tuple[TokenSeq, TokenSeq]:
        try:
            end = context.index(Token.EQUALS)
        except ValueError:
            raise OracleParseError(f"No complete question in context: {to_text(context)!r}") from None
        question = tuple(context[:end + 1])
        # 조회와 삽입을 한 번에 잠가 질문마다 정답을 한 번만 만든다 (builder 도 여러 워커가 공유)
        with self._lock:
            pair = self._cache.get(question)
            if pair is None:
                pair = self._build(question)
                if len(self._cache) >= CACHE_LIMIT:
                    self._cache.clear()
                self._cache[question] = pair
        return pair

    def _build(self, question: TokenSeq) -> tuple[TokenSeq, TokenSeq]:
        try:
            problem = parse_question(question)
        except TokenParseError as e:
            raise OracleParseError(f"Cannot parse question {to_text(question)!r}: {e}") from e
        if self.thought_type is ThoughtType.ROT:
            gt = self.builder.rot_tree(problem)
        else:
            gt = self.builder.training_contexts(problem, self.thought_type)[0]
        return gt.tokens, build_target(gt)

    def _check_prefix(self, context, tokens):
        if len(context) >= len(tokens) or tuple(context) != tokens[:len(context)]:
            raise OracleParseError(f"Context is not a proper prefix of its ground truth: {to_text(context)!r}")

    def next_token(self, context: TokenSeq) -> Token:
        context = tuple(context)
        tokens, target = self._ground_truth(context)
        self._check_prefix(context, tokens)
        i = len(context)
        return target[i] if target[i] is not Token.PAD else tokens[i]

    def predict_all(self, context: TokenSeq) -> TokenSeq:
        context = tuple(context)
        tokens, target = self._ground_truth(context)
        self._check_prefix(context, tokens)
        # 질문 내부 위치는 평가 대상이 아니므로 정답 토큰을 그대로 돌려준다
        return tuple(target[j + 1] if target[j + 1] is not Token.PAD else tokens[j + 1]
                     for j in range(len(context)))
