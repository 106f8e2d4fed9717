"""RoT / CoT 컨텍스트 길이 분포와 토큰 수 통계."""
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from modules.contexts import ContextBuilder
from modules.problems import sample_problems
from modules.rendering import render_question
from modules.tokens import to_text
from utils.rng_util import stream_rng

DEFAULT_BINS = 40


@dataclass
class LengthStats:
    task: str
    difficulty: int
    # 문제마다 균등 샘플한 RoT 컨텍스트 하나의 길이
    rot_sampled: list = field(default_factory=list)
    rot_max: list = field(default_factory=list)
    cot: list = field(default_factory=list)
    naive_tokens: list = field(default_factory=list)
    cached_tokens: list = field(default_factory=list)
    unique_contexts: list = field(default_factory=list)
    questions: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.cot)

    def problem_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "question": self.questions,
            "rot_sampled_length": self.rot_sampled,
            "rot_max_length": self.rot_max,
            "cot_length": self.cot,
            "unique_contexts": self.unique_contexts,
            "naive_tokens": self.naive_tokens,
            "cached_tokens": self.cached_tokens,
        })

    def histogram_frame(self, bins: int = DEFAULT_BINS) -> pd.DataFrame:
        """RoT/CoT 공통 로그 간격 구간의 빈도 (각 열의 합은 n)"""
        lengths = np.asarray(self.rot_sampled + self.cot, dtype=float)
        low = max(lengths.min(), 1.0)
        high = max(lengths.max(), low + 1.0)
        edges = np.unique(np.logspace(np.log10(low), np.log10(high), bins + 1))
        edges[0], edges[-1] = low, high
        rot_counts, _ = np.histogram(self.rot_sampled, bins=edges)
        cot_counts, _ = np.histogram(self.cot, bins=edges)
        return pd.DataFrame({
            "bin_low": edges[:-1],
            "bin_high": edges[1:],
            "rot": rot_counts,
            "cot": cot_counts,
        })

    def summary(self) -> dict:
        def describe(values):
            arr = np.asarray(values, dtype=float)
            return {"min": float(arr.min()), "median": float(np.median(arr)),
                    "mean": float(arr.mean()), "max": float(arr.max())}

        naive = np.asarray(self.naive_tokens, dtype=float)
        cached = np.asarray(self.cached_tokens, dtype=float)
        return {
            "task": self.task,
            "difficulty": self.difficulty,
            "n": self.n,
            "rot_sampled_length": describe(self.rot_sampled),
            "rot_max_length": describe(self.rot_max),
            "cot_length": describe(self.cot),
            "naive_tokens_mean": float(naive.mean()),
            "cached_tokens_mean": float(cached.mean()),
            "cache_saving": float(1.0 - cached.sum() / naive.sum()) if naive.sum() else 0.0,
        }


def length_and_token_stats(task: str, difficulty: int, n: int = 10_000, seed: int = 0,
                           builder: ContextBuilder = None) -> LengthStats:
    builder = ContextBuilder() if builder is None else builder
    stats = LengthStats(task=task, difficulty=difficulty)
    rng = stream_rng(seed, "length-sample", task, difficulty)
    for problem in sample_problems(task, difficulty, n, seed, purpose="stats"):
        contexts = builder.unique_contexts(problem)
        stats.questions.append(to_text(render_question(problem), sep=""))
        stats.rot_sampled.append(len(contexts[int(rng.integers(len(contexts)))]))
        stats.rot_max.append(max(len(c) for c in contexts))
        stats.cot.append(builder.cot_length(problem))
        stats.unique_contexts.append(len(contexts))
        stats.naive_tokens.append(builder.naive_generated_tokens(problem))
        stats.cached_tokens.append(sum(c.generated_tokens for c in contexts))
    return stats
