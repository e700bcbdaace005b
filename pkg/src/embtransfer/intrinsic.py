"""Neighbor-count exploration bonus and the epsilon schedule."""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class RewardConfig:
    beta: float = 0.1
    gamma: float = 0.9
    epsilon_init: float = 0.9
    epsilon_decay: float = 0.95
    epsilon_floor: float = 0.1

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")

    def epsilon(self, episode_index: int) -> float:
        return epsilon_at(episode_index, self.epsilon_init, self.epsilon_decay, self.epsilon_floor)


def intrinsic_reward(n_visits: int, d_e: int) -> float:
    """``1 / sqrt(N * d_e)``; both counts must be at least 1."""
    if n_visits < 1 or d_e < 1:
        raise ValueError(f"counts must be >= 1, got N={n_visits}, d_e={d_e}")
    return 1.0 / math.sqrt(n_visits * d_e)


def compound_reward(r_e: float, rho: float, beta: float) -> float:
    return r_e + beta * rho


def epsilon_at(t: int, init: float = 0.9, decay: float = 0.95, floor: float = 0.1) -> float:
    if t < 0:
        raise ValueError("episode index must be nonnegative")
    return init * decay ** t + floor
