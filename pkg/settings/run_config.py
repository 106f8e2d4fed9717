"""실행 설정 (pydantic). 검증 오류는 필드 경로가 포함된 ConfigError 로 바뀐다."""
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveFloat, PositiveInt, ValidationError, field_validator, model_validator

from modules.contexts import ThoughtType
from modules.errors import ConfigError
from modules.problems import TASKS
from modules.rot_engine import InferenceLimits
from modules.tokens import VOCAB_SIZE
from settings.env import default_workers, load_json_config


class ModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    d_model: PositiveInt = 128
    n_layers: PositiveInt = 3
    n_heads: PositiveInt = 4
    ffn_hidden: PositiveInt = 256
    max_context: PositiveInt = 1024
    vocab_size: PositiveInt = VOCAB_SIZE
    dropout: float = Field(0.0, ge=0.0, lt=1.0)
    tie_embeddings: bool = False

    @model_validator(mode="after")
    def _check_shapes(self):
        if self.d_model % self.n_heads:
            raise ValueError(f"d_model ({self.d_model}) must be divisible by n_heads ({self.n_heads})")
        if self.vocab_size < VOCAB_SIZE:
            raise ValueError(f"vocab_size must be at least {VOCAB_SIZE}")
        return self


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    batch_size: PositiveInt = 64
    learning_rate: PositiveFloat = 1e-3
    betas: tuple[float, float] = (0.9, 0.999)
    eps: PositiveFloat = 1e-8
    total_steps: PositiveInt = 20_000
    decay_interval: PositiveInt = 5_000
    eval_interval: PositiveInt = 1_000
    eval_problems: PositiveInt = 1_000
    early_stop_at_perfect: bool = True
    log_interval: PositiveInt = 100
    queue_size: PositiveInt = 8
    seed: NonNegativeInt = 0


class TaskSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    task: str
    difficulty: PositiveInt

    @field_validator("task")
    @classmethod
    def _known_task(cls, value):
        if value not in TASKS:
            raise ValueError(f"unknown task {value!r} (choose from {', '.join(TASKS)})")
        return value


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tasks: list[TaskSpec] = Field(default_factory=lambda: [TaskSpec(task="add", difficulty=2)], min_length=1)
    thought_type: ThoughtType = ThoughtType.ROT
    seeds: list[NonNegativeInt] = Field(default_factory=lambda: [0], min_length=1)
    n: PositiveInt = 1000
    predictor: Literal["oracle", "neural"] = "oracle"
    checkpoints: list[str] = Field(default_factory=list)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    limits: InferenceLimits = Field(default_factory=InferenceLimits)
    out: Optional[str] = None
    workers: PositiveInt = Field(default_factory=default_workers)
    trace: int = Field(0, ge=0)
    min_accuracy: Optional[float] = Field(None, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_predictor(self):
        if self.predictor == "neural" and not self.checkpoints:
            raise ValueError("predictor 'neural' requires at least one entry in checkpoints")
        return self

    def resolved(self) -> dict:
        """산출물에 기록하는 설정. workers 는 결과에 영향을 주지 않으므로 제외"""
        return self.model_dump(mode="json", exclude={"workers"})


DESK_TRAIN = TrainConfig()
FULL_TRAIN = TrainConfig(batch_size=256, total_steps=500_000, decay_interval=50_000,
                         eval_interval=20_000, eval_problems=30_000)

# (model, train, tasks). full 은 장시간 실행용
PRESETS = {
    "desk": (ModelConfig(max_context=256), DESK_TRAIN, [TaskSpec(task="add", difficulty=2)]),
    "relaxed-4digit": (ModelConfig(max_context=256), TrainConfig(total_steps=60_000, decay_interval=15_000),
                       [TaskSpec(task="add", difficulty=4)]),
    "full": (ModelConfig(max_context=2048), FULL_TRAIN, [TaskSpec(task="add", difficulty=8)]),
}


def format_validation_error(e: ValidationError) -> str:
    lines = []
    for err in e.errors():
        path = ".".join(str(part) for part in err["loc"]) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "; ".join(lines)


def _merge(base: dict, overrides: dict) -> dict:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_run_config(path=None, overrides: dict = None, preset: str = None) -> RunConfig:
    data = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"preset: unknown preset {preset!r} (choose from {', '.join(PRESETS)})")
        model, train, tasks = PRESETS[preset]
        data = {"model": model.model_dump(), "train": train.model_dump(),
                "tasks": [t.model_dump() for t in tasks]}
    if path is not None:
        data = _merge(data, load_json_config(path))
    if overrides:
        data = _merge(data, {k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid run config: {format_validation_error(e)}") from e
