"""재현 가능한 난수 스트림.

모든 샘플링은 numpy PCG64 를 쓰고, (seed, 용도, task, difficulty, index) 별로
SeedSequence 의 spawn_key 를 달리해 독립 스트림을 만든다. 같은 키는 워커 수나
실행 순서와 무관하게 항상 같은 수열을 낸다.
"""
import zlib

import numpy as np


def _key_part(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part)


def stream_rng(seed: int, *key) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(_key_part(k) for k in key))
    return np.random.Generator(np.random.PCG64(sequence))


def problem_rng(seed: int, task: str, difficulty: int, index: int, purpose: str = "test") -> np.random.Generator:
    return stream_rng(seed, purpose, task, difficulty, index)
