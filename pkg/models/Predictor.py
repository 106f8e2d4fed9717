from abc import ABC, abstractmethod

from modules.tokens import Token, TokenSeq


class Predictor(ABC):
    """다음 토큰 예측기 인터페이스. 외부에서 보기에 상태가 없고 결정적이어야 한다."""

    max_context: int

    @abstractmethod
    def next_token(self, context: TokenSeq) -> Token:
        ...

    def predict_all(self, context: TokenSeq) -> TokenSeq:
        """위치 j 에서의 greedy 예측 (= next_token(context[:j + 1])) 을 한 번에 반환"""
        return tuple(self.next_token(context[:j + 1]) for j in range(len(context)))
