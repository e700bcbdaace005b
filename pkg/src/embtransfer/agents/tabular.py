"""Tabular Q-learning and successor-representation learners."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .base import Agent, AgentParams
from .replay import ExperienceRecord


def tabular_q_update(Q: np.ndarray, rec: ExperienceRecord, alpha: float, gamma: float,
                     use_ir: bool = False, beta: float = 0.0) -> float:
    """One Q-learning step in place; returns the TD error."""
    r = rec.reward(beta, use_ir)
    bootstrap = 0.0 if rec.done else gamma * Q[rec.s_next].max()
    delta = r + bootstrap - Q[rec.s, rec.a]
    Q[rec.s, rec.a] += alpha * delta
    return float(delta)


class QLearningAgent(Agent):
    name = "qlearning"

    def __init__(self, n_states, n_actions, tracker, params: AgentParams, seed=0, use_ir=False):
        super().__init__(n_states, n_actions, tracker, params, seed, use_ir)
        self.Q = np.zeros((n_states, n_actions))

    def action_values(self, s):
        return self.Q[s]

    def observe(self, rec):
        tabular_q_update(self.Q, rec, self.params.alpha, self.params.gamma, self.use_ir, self.beta)

    def start_task(self, task_index):
        super().start_task(task_index)
        if task_index > 0:
            self.Q[:] = 0.0


@dataclass
class TabularSR:
    """State successor matrix ``M`` and reward weights ``w``; ``V = M @ w``."""

    n_states: int
    M: np.ndarray = field(default=None)
    w: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.M is None:
            self.M = np.eye(self.n_states)
        if self.w is None:
            self.w = np.zeros(self.n_states)

    def values(self) -> np.ndarray:
        return self.M @ self.w


def sr_update(sr: TabularSR, rec: ExperienceRecord, alpha: float, gamma: float,
              alpha_w: Optional[float] = None, reward: Optional[float] = None) -> None:
    """TD step on the occupancy row of ``rec.s`` and on the reward weight of ``rec.s_next``.

    On a terminal transition the successor's occupancy is counted once and
    not bootstrapped further.
    """
    onehot = np.zeros(sr.n_states)
    onehot[rec.s] = 1.0
    if rec.done:
        target = onehot.copy()
        target[rec.s_next] += gamma
    else:
        target = onehot + gamma * sr.M[rec.s_next]
    sr.M[rec.s] += alpha * (target - sr.M[rec.s])
    r = rec.r_e if reward is None else reward
    aw = alpha if alpha_w is None else alpha_w
    sr.w[rec.s_next] += aw * (r - sr.w[rec.s_next])


class SRAgent(Agent):
    """Control with action-conditioned successor rows ``H[a, s] . w``.

    ``H`` is updated off-policy toward the greedy successor action.  On a task
    switch the occupancy is kept and only ``w`` is re-learned.
    """

    name = "sr"

    def __init__(self, n_states, n_actions, tracker, params: AgentParams, seed=0, use_ir=False):
        super().__init__(n_states, n_actions, tracker, params, seed, use_ir)
        self.H = np.stack([np.eye(n_states) for _ in range(n_actions)])
        self.w = np.zeros(n_states)

    def action_values(self, s):
        return self.H[:, s, :] @ self.w

    def observe(self, rec):
        p = self.params
        gamma = p.gamma
        row = self.H[rec.a, rec.s]
        if rec.done:
            target = np.zeros(self.n_states)
            target[rec.s_next] = gamma
        else:
            a_next = int(np.argmax(self.action_values(rec.s_next)))
            target = gamma * self.H[a_next, rec.s_next]
        target[rec.s] += 1.0
        row += p.alpha * (target - row)
        self.w[rec.s_next] += p.sr_alpha_w * (self.reward(rec) - self.w[rec.s_next])

    def start_task(self, task_index):
        super().start_task(task_index)
        if task_index > 0:
            self.w[:] = 0.0
