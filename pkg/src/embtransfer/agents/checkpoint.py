"""Agent checkpoints: parameters, tracker snapshot and enough metadata to rebuild."""
from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ..dynamics import DynamicsTracker
from ..nn import DenseNet
from .base import Agent, AgentParams

_ARRAYS = ("Q", "H", "w", "_pvf")
_NETS = ("q_net", "target_net", "actor", "critic")


def _nets(agent: Agent):
    out = {k: getattr(agent, k) for k in _NETS if isinstance(getattr(agent, k, None), DenseNet)}
    if agent.embedding is not None:
        out["embedding"] = agent.embedding.net
    return out


def save_checkpoint(agent: Agent, directory) -> Path:
    """Write ``meta.json``, ``params.npz`` and ``tracker.jsonl`` into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    arrays = {k: getattr(agent, k) for k in _ARRAYS if isinstance(getattr(agent, k, None), np.ndarray)}
    arrays.update({"net." + k: net.flat() for k, net in _nets(agent).items()})
    np.savez(directory / "params.npz", **arrays)
    meta = {
        "name": agent.name, "n_states": agent.n_states, "n_actions": agent.n_actions,
        "seed": agent.seed, "task_index": agent.task_index, "beta": agent.beta,
        "total_steps": agent.total_steps, "params": asdict(agent.params),
        "embedding_frozen": bool(agent.embedding is not None and agent.embedding.frozen),
    }
    (directory / "meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True))
    agent.tracker.save_snapshot(directory / "tracker.jsonl")
    return directory


def load_checkpoint(directory) -> Agent:
    """Rebuild an agent from :func:`save_checkpoint` output."""
    from . import make_agent

    directory = Path(directory)
    meta = json.loads((directory / "meta.json").read_text())
    tracker = DynamicsTracker.load_snapshot(directory / "tracker.jsonl")
    agent = make_agent(meta["name"], meta["n_states"], meta["n_actions"],
                       AgentParams(**meta["params"]), seed=meta["seed"], tracker=tracker)
    agent.task_index = meta["task_index"]
    agent.beta = meta["beta"]
    agent.total_steps = meta["total_steps"]
    with np.load(directory / "params.npz") as data:
        nets = _nets(agent)
        for key in data.files:
            if key.startswith("net."):
                nets[key[4:]].set_flat(data[key])
            else:
                setattr(agent, key, data[key].copy())
    if agent.embedding is not None:
        agent.embedding.invalidate()
        agent.embedding.frozen = meta["embedding_frozen"]
    return agent
