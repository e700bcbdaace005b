"""Agents and the episode loop.

Names ending in ``+`` add the neighbor-count bonus to the learning reward.
"""
from __future__ import annotations

from typing import Optional

from ..dynamics import DynamicsTracker
from .base import Agent, AgentParams, select_action
from .checkpoint import load_checkpoint, save_checkpoint
from .deep import ActorCriticAgent, DeepQAgent, actor_critic_update, td_value_update
from .pvf import PVFAgent, PvfBasis, graph_laplacian, pvf_basis
from .replay import Batch, ExperienceRecord, ReplayBuffer
from .runner import EpisodeMetrics, run_episode
from .tabular import QLearningAgent, SRAgent, TabularSR, sr_update, tabular_q_update

# name -> (class, extra constructor kwargs)
_BASE = {
    "qlearning": (QLearningAgent, {}),
    "sr": (SRAgent, {}),
    "dqn": (DeepQAgent, {"learn_embedding": False}),
    "ac": (ActorCriticAgent, {"learn_embedding": False}),
    "state2emb": (DeepQAgent, {"learn_embedding": True}),
    "state2emb_ac": (ActorCriticAgent, {"learn_embedding": True}),
    "pvf": (PVFAgent, {}),
}

AGENT_NAMES = sorted(list(_BASE) + [n + "+" for n in _BASE if n != "pvf"])


def make_agent(name: str, n_states: int, n_actions: int, params: Optional[AgentParams] = None,
               seed: int = 0, tracker: Optional[DynamicsTracker] = None) -> Agent:
    if name not in AGENT_NAMES:
        raise KeyError(f"unknown agent {name!r}; known: {', '.join(AGENT_NAMES)}")
    use_ir = name.endswith("+")
    cls, extra = _BASE[name.rstrip("+")]
    agent = cls(n_states, n_actions, tracker, params or AgentParams(), seed=seed,
                use_ir=use_ir, **extra)
    agent.name = name
    return agent


__all__ = [
    "AGENT_NAMES", "ActorCriticAgent", "Agent", "AgentParams", "Batch", "DeepQAgent",
    "EpisodeMetrics", "ExperienceRecord", "PVFAgent", "PvfBasis", "QLearningAgent",
    "ReplayBuffer", "SRAgent", "load_checkpoint", "save_checkpoint", "TabularSR", "actor_critic_update", "graph_laplacian",
    "make_agent", "pvf_basis", "run_episode", "select_action", "sr_update",
    "tabular_q_update", "td_value_update",
]
