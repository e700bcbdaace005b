from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..gridworld import GridEnv, Task
from ..intrinsic import intrinsic_reward
from .base import Agent
from .replay import ExperienceRecord


@dataclass
class EpisodeMetrics:
    extrinsic_return: float
    steps: int
    new_states: int
    unique_states: int
    success: bool
    loss_s: float = math.nan
    loss_csc: float = math.nan


def run_episode(agent: Agent, env: GridEnv, task: Task, epsilon: float,
                visits: Optional[np.ndarray] = None, learn: bool = True) -> EpisodeMetrics:
    """Play one episode, interleaving the per-step bookkeeping and periodic training.

    Per step: act, transition, update counts/neighbors/episodic degree, read
    the bonus of the arrival state, store the record, then every ``t_freq``
    global steps call ``agent.train()``.  ``visits`` (length ``n_states``)
    accumulates arrivals when given.  With ``learn=False`` the agent neither
    stores nor trains (evaluation); the tracker is still updated.
    """
    tracker = agent.tracker
    t_freq = agent.params.t_freq
    before = len(tracker)
    s = env.reset(task)
    tracker.start_episode(s)
    ret = 0.0
    ls, lc = [], []
    while True:
        a = agent.act(s, epsilon)
        out = env.step(a)
        s_next = out.next_state
        tracker.observe(s, s_next)
        rho = intrinsic_reward(tracker.count(s_next), tracker.episodic_degree(s_next))
        rec = ExperienceRecord(s, a, out.extrinsic_reward, rho, s_next, out.done)
        agent.total_steps += 1
        if learn:
            agent.observe(rec)
        if learn and agent.total_steps % t_freq == 0:
            losses = agent.train()
            if losses and "L_s" in losses:
                ls.append(losses["L_s"])
                lc.append(losses["L_csc"])
        if visits is not None:
            visits[s_next] += 1
        ret += out.extrinsic_reward
        s = s_next
        if out.done:
            break
    return EpisodeMetrics(
        extrinsic_return=ret,
        steps=out.step_index,
        new_states=len(tracker) - before,
        unique_states=len(tracker),
        success=s == task.goal,
        loss_s=float(np.mean(ls)) if ls else math.nan,
        loss_csc=float(np.mean(lc)) if lc else math.nan,
    )
