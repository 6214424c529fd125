"""Deterministic random streams.

Every stream is a numpy ``PCG64`` generator seeded from
``SeedSequence(master_seed, spawn_key=(task_key, index))`` where ``task_key`` is
the CRC-32 of the task name.  Both the hash and numpy's seed expansion are
platform independent, so ``(master_seed, task, index)`` pins the stream.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

__all__ = ["SeedPolicy", "task_key"]


def task_key(task: str) -> int:
    return zlib.crc32(task.encode("utf-8"))


@dataclass(frozen=True)
class SeedPolicy:
    master_seed: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")

    def seed_sequence(self, task: str, index: int = 0) -> np.random.SeedSequence:
        return np.random.SeedSequence(int(self.master_seed), spawn_key=(task_key(task), int(index)))

    def generator(self, task: str, index: int = 0) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed_sequence(task, index)))

    def generators(self, task: str, count: int) -> list[np.random.Generator]:
        return [self.generator(task, i) for i in range(count)]
