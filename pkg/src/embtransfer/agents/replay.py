from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class ExperienceRecord:
    s: int
    a: int
    r_e: float
    rho: float
    s_next: int
    done: bool

    def reward(self, beta: float, use_ir: bool) -> float:
        return self.r_e + beta * self.rho if use_ir else self.r_e


class Batch(NamedTuple):
    s: np.ndarray
    a: np.ndarray
    r_e: np.ndarray
    rho: np.ndarray
    s_next: np.ndarray
    done: np.ndarray

    def __len__(self) -> int:
        return len(self.s)

    def rewards(self, beta: float, use_ir: bool) -> np.ndarray:
        return self.r_e + beta * self.rho if use_ir else self.r_e

    @classmethod
    def from_records(cls, records) -> "Batch":
        return cls(
            np.array([r.s for r in records], dtype=np.int64),
            np.array([r.a for r in records], dtype=np.int64),
            np.array([r.r_e for r in records], dtype=float),
            np.array([r.rho for r in records], dtype=float),
            np.array([r.s_next for r in records], dtype=np.int64),
            np.array([r.done for r in records], dtype=bool),
        )


class ReplayBuffer:
    """Bounded FIFO of experience stored column-wise; oldest entries are overwritten."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._s = np.zeros(capacity, dtype=np.int64)
        self._a = np.zeros(capacity, dtype=np.int64)
        self._r = np.zeros(capacity)
        self._rho = np.zeros(capacity)
        self._s2 = np.zeros(capacity, dtype=np.int64)
        self._done = np.zeros(capacity, dtype=bool)
        self._next = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, rec: ExperienceRecord) -> None:
        i = self._next
        self._s[i], self._a[i], self._r[i] = rec.s, rec.a, rec.r_e
        self._rho[i], self._s2[i], self._done[i] = rec.rho, rec.s_next, rec.done
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def clear(self) -> None:
        self._next = 0
        self._size = 0

    def _take(self, idx: np.ndarray) -> Batch:
        return Batch(self._s[idx], self._a[idx], self._r[idx], self._rho[idx],
                     self._s2[idx], self._done[idx])

    def sample(self, k: int, rng: np.random.Generator) -> Batch:
        if self._size == 0:
            raise ValueError("cannot sample from an empty buffer")
        return self._take(rng.integers(self._size, size=k))

    def all(self) -> Batch:
        """Every stored record, oldest first."""
        if self._size < self.capacity:
            idx = np.arange(self._size)
        else:
            idx = (np.arange(self.capacity) + self._next) % self.capacity
        return self._take(idx)
