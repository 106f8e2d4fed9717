"""TinyTransformer 학습 루프.

배치는 별도 생산자 스레드가 만들어 bounded queue 로 넘기고, 학습 스레드만 모델을 갱신한다.
eval_interval 마다 고정된 테스트 셋을 중복 제거 평가로 측정하고 체크포인트를 남긴다.
"""
import math
import queue
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import pandas as pd
import torch
import torch.nn as nn
from tqdm import tqdm

from models.CheckpointManager import CheckpointManager
from models.TinyTransformer import NeuralPredictor, TinyTransformer
from modules.contexts import ContextBuilder, ThoughtType, sample_training_context
from modules.errors import ContextOverflow, TrainingDiverged
from modules.evaluator import evaluate_problems
from modules.problems import sample_problem, sample_problems
from modules.thoughts import CACHE_LIMIT
from modules.tokens import Token
from settings.env import DEVICE
from settings.run_config import RunConfig
from utils.rng_util import stream_rng

# 연속으로 이만큼 max_context 를 넘는 샘플이 나오면 학습 불가로 본다
MAX_CONSECUTIVE_SKIPS = 1_000
# ContextBuilder 메모 크기 상한 (넘으면 비운다)
BUILDER_CACHE_LIMIT = CACHE_LIMIT

_END = object()


def make_batch(pairs, device="cpu"):
    """(context, target) 목록 -> 입력 X[:, :-1], 정답 Y[:, 1:] (PAD 로 오른쪽 채움)"""
    width = max(len(tokens) for tokens, _ in pairs)
    x = torch.full((len(pairs), width), int(Token.PAD), dtype=torch.long)
    y = torch.full((len(pairs), width), int(Token.PAD), dtype=torch.long)
    for i, (tokens, target) in enumerate(pairs):
        x[i, :len(tokens)] = torch.tensor([int(t) for t in tokens], dtype=torch.long)
        y[i, :len(target)] = torch.tensor([int(t) for t in target], dtype=torch.long)
    return x[:, :-1].to(device), y[:, 1:].to(device)


def masked_loss(model, inputs, targets, criterion=None):
    criterion = criterion or nn.CrossEntropyLoss(ignore_index=int(Token.PAD))
    logits = model(inputs)
    return criterion(logits.reshape(-1, logits.size(-1)), targets.reshape(-1))


def train_step(model, optimizer, inputs, targets, step: int = 0, criterion=None) -> float:
    optimizer.zero_grad()
    loss = masked_loss(model, inputs, targets, criterion)
    value = loss.item()
    if not math.isfinite(value):
        lr = optimizer.param_groups[0]["lr"]
        raise TrainingDiverged(f"Non-finite loss {value} at step {step} (lr={lr})")
    loss.backward()
    optimizer.step()
    return value


class BatchProducer(threading.Thread):
    """학습 배치를 미리 만들어 queue 에 넣는 생산자 스레드"""

    def __init__(self, config: RunConfig, rng, out_queue: queue.Queue, steps: int):
        super().__init__(daemon=True)
        self.config = config
        self.rng = rng
        self.queue = out_queue
        self.steps = steps
        self.builder = ContextBuilder()
        self.skipped = 0
        self._stop_event = threading.Event()

    def stop(self):
        self._stop_event.set()

    def _sample_pair(self):
        tasks = self.config.tasks
        max_context = self.config.model.max_context
        skips = 0
        while True:
            spec = tasks[int(self.rng.integers(len(tasks)))]
            problem = sample_problem(spec.task, spec.difficulty, self.rng)
            # CoT 는 펼치기 전에 길이부터 확인
            if self.config.thought_type is not ThoughtType.COT or self.builder.cot_length(problem) <= max_context:
                context, target = sample_training_context(
                    problem, self.rng, self.builder, self.config.thought_type)
                if len(context) <= max_context:
                    return context.tokens, target
            skips += 1
            self.skipped += 1
            if skips >= MAX_CONSECUTIVE_SKIPS:
                raise ContextOverflow(
                    f"{skips} consecutive {self.config.thought_type.value} samples exceed "
                    f"max_context={max_context}; this task/difficulty cannot be trained at this context size")

    def _put(self, item) -> bool:
        while not self._stop_event.is_set():
            try:
                self.queue.put(item, timeout=0.5)
                return True
            except queue.Full:
                continue
        return False

    def run(self):
        try:
            for _ in range(self.steps):
                if self.builder.cache_size() > BUILDER_CACHE_LIMIT:
                    self.builder.clear()
                pairs = [self._sample_pair() for _ in range(self.config.train.batch_size)]
                # 이 배치를 소비한 시점의 RNG 상태 (체크포인트 재개용)
                if not self._put((pairs, self.rng.bit_generator.state)):
                    return
        except Exception as e:
            self._put(e)
            return
        self._put(_END)


@dataclass
class TrainResult:
    model: TinyTransformer
    step: int
    accuracy: Optional[float]
    checkpoint: Optional[str]
    metrics: pd.DataFrame = field(default_factory=pd.DataFrame)
    stopped_early: bool = False


def held_out_problems(config: RunConfig) -> dict:
    train = config.train
    return {
        f"{spec.task}-{spec.difficulty}": sample_problems(spec.task, spec.difficulty, train.eval_problems,
                                                          train.seed, purpose="test")
        for spec in config.tasks
    }


def evaluate_model(model, test_sets: dict, config: RunConfig, device=DEVICE) -> dict:
    """과제별 정확도. 평가 후 모델을 학습 모드로 되돌린다."""
    predictor = NeuralPredictor(model, device=device)
    scores = {}
    for name, problems in test_sets.items():
        report = evaluate_problems(predictor, problems, thought_type=config.thought_type,
                                   workers=config.workers, progress=False)
        scores[name] = report.accuracy
    model.train()
    return scores


def train_loop(config: RunConfig, out_dir, device=DEVICE, resume=None, progress: bool = True) -> TrainResult:
    train = config.train
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(train.seed)

    model = TinyTransformer(config.model).to(device)
    optimizer = torch.optim.Adam(model.parameters(), lr=train.learning_rate, betas=train.betas, eps=train.eps)
    scheduler = torch.optim.lr_scheduler.StepLR(optimizer, step_size=train.decay_interval, gamma=0.5)
    checkpoints = CheckpointManager(out_dir / "checkpoints")
    data_rng = stream_rng(train.seed, "train-batches")

    start_step = 0
    if resume is not None:
        payload = CheckpointManager.load_checkpoint(resume, device)
        model.load_state_dict(payload["model_state"])
        if payload["optimizer_state"] is not None:
            optimizer.load_state_dict(payload["optimizer_state"])
        if payload["scheduler_state"] is not None:
            scheduler.load_state_dict(payload["scheduler_state"])
        if payload.get("data_rng_state"):
            data_rng.bit_generator.state = payload["data_rng_state"]
        torch.set_rng_state(payload["torch_rng_state"])
        start_step = payload["step"]
        print(f"[train] resumed from {resume} at step {start_step}")

    test_sets = held_out_problems(config)
    criterion = nn.CrossEntropyLoss(ignore_index=int(Token.PAD))
    batches: queue.Queue = queue.Queue(maxsize=train.queue_size)
    producer = BatchProducer(config, data_rng, batches, train.total_steps - start_step)
    producer.start()

    rows = []
    step = start_step
    accuracy = None
    stopped_early = False
    checkpoint_file = None
    data_state = data_rng.bit_generator.state
    running_loss = 0.0
    model.train()
    bar = tqdm(total=train.total_steps, initial=start_step, desc="train", leave=False, disable=not progress)
    try:
        while step < train.total_steps:
            item = batches.get()
            if item is _END:
                break
            if isinstance(item, Exception):
                raise item
            pairs, data_state = item
            inputs, targets = make_batch(pairs, device)
            lr = optimizer.param_groups[0]["lr"]
            loss = train_step(model, optimizer, inputs, targets, step, criterion)
            scheduler.step()
            step += 1
            running_loss += loss
            bar.update(1)

            if step % train.log_interval == 0:
                mean_loss = running_loss / train.log_interval
                running_loss = 0.0
                rows.append({"step": step, "loss": mean_loss, "lr": lr, "accuracy": None})
                bar.set_postfix(loss=f"{mean_loss:.4f}", lr=f"{lr:.2e}")

            if step % train.eval_interval == 0 or step == train.total_steps:
                scores = evaluate_model(model, test_sets, config, device)
                accuracy = min(scores.values())
                rows.append({"step": step, "loss": loss, "lr": lr, "accuracy": accuracy})
                print(f"[train] step={step} loss={loss:.4f} lr={lr:.2e} "
                      + " ".join(f"{name}={acc:.4f}" for name, acc in scores.items()))
                checkpoint_file = checkpoints.save_checkpoint(
                    model, optimizer, scheduler, step, train, data_state,
                    metrics={"accuracy": scores, "config": config.resolved()})
                pd.DataFrame(rows).to_csv(out_dir / "metrics.csv", index=False)
                if train.early_stop_at_perfect and accuracy >= 1.0:
                    print(f"✅ [train] perfect accuracy at step {step}, stopping early")
                    stopped_early = True
                    break
    finally:
        producer.stop()
        bar.close()

    if producer.skipped:
        print(f"[train] skipped {producer.skipped} samples longer than max_context={config.model.max_context}")
    metrics = pd.DataFrame(rows, columns=["step", "loss", "lr", "accuracy"])
    metrics.to_csv(out_dir / "metrics.csv", index=False)
    return TrainResult(model=model, step=step, accuracy=accuracy, checkpoint=checkpoint_file,
                       metrics=metrics, stopped_early=stopped_early)
