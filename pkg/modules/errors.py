class RotLabError(Exception):
    """rot-lab 공통 예외"""


class ConfigError(RotLabError, ValueError):
    pass


class TokenParseError(RotLabError, ValueError):
    pass


class RenderError(RotLabError, ValueError):
    """값을 토큰열로 옮길 수 없음 (음수, 숫자가 아닌 문자)"""


class OracleParseError(TokenParseError):
    pass


class RecursionGuardError(RotLabError, RuntimeError):
    pass


class InferenceError(RotLabError):
    """rot_infer 실행 중 발생한 오류. trace 는 중단 시점까지의 기록"""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ContextOverflow(InferenceError):
    pass


class DepthExceeded(InferenceError):
    pass


class BudgetExceeded(InferenceError):
    pass


class ProtocolViolation(InferenceError):
    pass


class TrainingDiverged(RotLabError, RuntimeError):
    pass


class CheckpointError(RotLabError, OSError):
    pass
