"""Transfer suite and exploration study over a parsed :class:`ExperimentConfig`."""
from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..agents import Agent, make_agent, run_episode, save_checkpoint
from ..dynamics import DynamicsTracker
from ..gridworld import GridEnv, Task, build_env, sample_task
from ..intrinsic import epsilon_at
from .config import ConfigError, ExperimentConfig
from .heatmap import emit_heatmap
from .metrics import SCHEMA_VERSION, MetricsRecord, MetricsWriter

TASK_STREAM = 7919
Progress = Optional[Callable[[str], None]]


def suite_tasks(env: GridEnv, seed: int, count: int, max_steps: int) -> List[Task]:
    """Tasks for one seed; every agent run with that seed sees the same sequence."""
    rng = np.random.default_rng([TASK_STREAM, seed])
    return [sample_task(env, rng, max_steps) for _ in range(count)]


def run_label(agent: str, seed: int) -> str:
    return f"{agent}_seed{seed}"


def embedding_checksum(agent: Agent) -> str:
    return agent.embedding.checksum() if agent.embedding is not None else ""


def ir_field(tracker: DynamicsTracker, n_states: int) -> np.ndarray:
    """``1/sqrt(N d_e)`` per state from the final counts.

    A state never reached uses ``N = 1``, i.e. the bonus its first arrival would earn.
    """
    return np.array([1.0 / np.sqrt(max(tracker.count(s), 1) * tracker.episodic_degree(s))
                     for s in range(n_states)])


def _record(cfg, agent, seed, task, episode, m, t0) -> MetricsRecord:
    return MetricsRecord(
        schema_version=SCHEMA_VERSION, run_id=cfg.run_id, agent=agent.name, seed=seed,
        task=task, episode=episode, extrinsic_return=float(m.extrinsic_return), steps=m.steps,
        unique_states=m.unique_states, new_states=m.new_states, success=int(m.success),
        loss_s=float(m.loss_s), loss_csc=float(m.loss_csc),
        embedding_checksum=embedding_checksum(agent), wall_clock=time.perf_counter() - t0,
    )


def run_agent_suite(cfg: ExperimentConfig, name: str, seed: int, out: Path,
                    env: Optional[GridEnv] = None) -> Tuple[Agent, Path]:
    """One isolated (agent, seed) replica of the multi-task protocol.

    Task 0 is the source; ``start_task(k)`` freezes the embedding and resets
    the value module for every later task.  Rows are flushed per episode.
    """
    env = env or build_env(cfg.grid())
    tasks = suite_tasks(env, seed, cfg.task_count, cfg.episode_limit())
    agent = make_agent(name, env.n_states, env.n_actions, cfg.params, seed=seed)
    path = out / "metrics" / f"{run_label(name, seed)}.csv"
    t0 = time.perf_counter()
    with MetricsWriter(path) as writer:
        for k, task in enumerate(tasks):
            if k > 0 and not cfg.persist_counts:
                agent.tracker = DynamicsTracker()
            agent.start_task(k)
            for t in range(cfg.episodes_per_task):
                m = run_episode(agent, env, task, epsilon_at(t))
                writer.write(_record(cfg, agent, seed, k, t, m, t0))
    if cfg.save_checkpoints:
        save_checkpoint(agent, out / "checkpoints" / run_label(name, seed))
    (out / "snapshots").mkdir(exist_ok=True)
    agent.tracker.save_snapshot(out / "snapshots" / f"{run_label(name, seed)}.jsonl", env)
    return agent, path


def run_transfer_suite(cfg: ExperimentConfig, progress: Progress = None) -> List[Path]:
    """Every configured agent on every seed; returns the metrics CSV paths."""
    out = cfg.output_path()
    out.mkdir(parents=True, exist_ok=True)
    env = build_env(cfg.grid())
    paths = []
    for name in cfg.agents:
        for seed in cfg.seeds:
            _, path = run_agent_suite(cfg, name, seed, out, env)
            paths.append(path)
            if progress:
                progress(f"wrote {path}")
    return paths


@dataclass
class ExplorationResult:
    agent: str
    seed: int
    unique_states: List[int]    # after each episode
    visits: np.ndarray          # arrivals per state
    ir: np.ndarray              # final bonus field
    total_steps: int


def _check_pairs(agents) -> None:
    names = set(agents)
    for a in agents:
        partner = a[:-1] if a.endswith("+") else a + "+"
        if a != "pvf" and partner not in names:
            raise ConfigError(f"exploration study needs agent pairs; {a!r} lacks {partner!r}")


def run_exploration_study(cfg: ExperimentConfig, progress: Progress = None
                          ) -> Dict[Tuple[str, int], ExplorationResult]:
    """``episodes_per_task`` episodes of the first task per (agent, seed).

    Writes the metrics CSV, visitation and bonus heatmaps, and the tracker snapshot.
    """
    _check_pairs(cfg.agents)
    out = cfg.output_path()
    out.mkdir(parents=True, exist_ok=True)
    grid = cfg.grid()
    env = build_env(grid)
    for sub in ("heatmaps", "snapshots"):
        (out / sub).mkdir(exist_ok=True)
    results = {}
    for name in cfg.agents:
        for seed in cfg.seeds:
            task = suite_tasks(env, seed, 1, cfg.episode_limit())[0]
            agent = make_agent(name, env.n_states, env.n_actions, cfg.params, seed=seed)
            agent.start_task(0)
            visits = np.zeros(env.n_states, dtype=np.int64)
            label = run_label(name, seed)
            curve, steps = [], 0
            t0 = time.perf_counter()
            with MetricsWriter(out / "metrics" / f"{label}.csv") as writer:
                for t in range(cfg.episodes_per_task):
                    m = run_episode(agent, env, task, epsilon_at(t), visits=visits)
                    writer.write(_record(cfg, agent, seed, 0, t, m, t0))
                    curve.append(m.unique_states)
                    steps += m.steps
            ir = ir_field(agent.tracker, env.n_states)
            emit_heatmap(grid, visits, out / "heatmaps" / f"{label}_visits.pgm")
            emit_heatmap(grid, ir, out / "heatmaps" / f"{label}_ir.pgm")
            agent.tracker.save_snapshot(out / "snapshots" / f"{label}.jsonl", env)
            results[(name, seed)] = ExplorationResult(name, seed, curve, visits, ir, steps)
            if progress:
                progress(f"{label}: {curve[-1]} unique states after {len(curve)} episodes")
    return results
