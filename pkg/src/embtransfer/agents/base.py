from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from ..dynamics import DynamicsTracker
from .replay import ExperienceRecord


@dataclass
class AgentParams:
    """Hyperparameters shared by every agent; each agent reads what it needs."""

    beta: float = 0.1
    gamma: float = 0.9
    alpha: float = 0.1              # tabular step size
    lr: float = 1e-3                # value/policy network step size
    embedding_lr: Optional[float] = None  # None reuses lr
    optimizer: str = "sgd"
    embedding_dim: int = 10
    hidden: int = 64
    w_margin: float = 0.5
    state_batch_size: int = 32
    batch_size: int = 32
    replay_capacity: int = 10_000
    ac_replay_capacity: int = 32
    t_freq: int = 4
    target_sync: int = 200
    embedding_loss_weight: float = 1.0
    separation_form: str = "text"
    target_beta: Optional[float] = None   # beta on target tasks; None keeps beta
    sr_alpha_w: float = 0.5

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


def select_action(values: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy over ``values``; ties go to the lowest action index.

    Always consumes one uniform draw, plus one integer draw when exploring.
    """
    if rng.random() < epsilon:
        return int(rng.integers(len(values)))
    return int(np.argmax(values))


def seed_streams(seed: int, n: int = 4):
    """Independent generators: (init, act, replay, embedding)."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


class Agent:
    """Common surface used by the episode runner.

    Subclasses implement ``action_values``, ``observe`` and optionally
    ``train`` and ``start_task``.
    """

    name = "agent"
    use_ir = False

    def __init__(self, n_states: int, n_actions: int, tracker: Optional[DynamicsTracker],
                 params: AgentParams, seed: int = 0, use_ir: bool = False):
        self.n_states = n_states
        self.n_actions = n_actions
        self.tracker = tracker if tracker is not None else DynamicsTracker()
        self.params = params
        self.seed = seed
        self.use_ir = use_ir
        self.beta = params.beta
        self.total_steps = 0
        self.task_index = 0
        self.init_rng, self.act_rng, self.replay_rng, self.embed_rng = seed_streams(seed)

    def action_values(self, s: int) -> np.ndarray:
        raise NotImplementedError

    def act(self, s: int, epsilon: float) -> int:
        return select_action(self.action_values(s), epsilon, self.act_rng)

    def reward(self, rec: ExperienceRecord) -> float:
        return rec.reward(self.beta, self.use_ir)

    def observe(self, rec: ExperienceRecord) -> None:
        pass

    def train(self) -> Optional[dict]:
        return None

    def start_task(self, task_index: int) -> None:
        """Called before the first episode of every task (index 0 = source)."""
        self.task_index = task_index
        if task_index > 0 and self.params.target_beta is not None:
            self.beta = self.params.target_beta

    @property
    def embedding(self):
        return None
