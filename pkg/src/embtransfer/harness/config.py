"""Experiment configuration in a flat ``key = value`` text format.

One setting per line; ``#`` starts a comment; blank lines are ignored.
Lists are comma separated; ``none`` clears an optional value; booleans are
``true``/``false``.  Every agent hyperparameter of
:class:`~embtransfer.agents.AgentParams` is a valid key.  Example::

    layout = empty_room
    size = 10
    agents = state2emb+, dqn, sr
    seeds = 0, 1, 2
    task_count = 4
    episodes_per_task = 300
    optimizer = adam
"""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import List, Optional, Tuple

from ..agents import AGENT_NAMES, AgentParams
from ..gridworld import (
    DEFAULT_MAX_STEPS, GridSpec, LAYOUT_KINDS, LayoutError, build_env, load_layout, make_layout,
)

OUTPUT_ROOT_ENV = "EMBTRANSFER_OUTPUT_ROOT"
RESOLVED_NAME = "resolved_config.txt"


class ConfigError(ValueError):
    """Missing file, malformed line, unknown key or invalid value."""


@dataclass
class ExperimentConfig:
    run_id: str = "run"
    layout: str = "empty_room"       # empty_room | four_room | multi_room | path to a text map
    size: Optional[int] = None       # room side (empty/four room) or per-room side (multi room)
    n_rooms: int = 3
    max_steps: Optional[int] = None  # None uses the layout default
    agents: Tuple[str, ...] = ("state2emb+",)
    seeds: Tuple[int, ...] = (0,)
    task_count: int = 4
    episodes_per_task: int = 300
    persist_counts: bool = True      # keep life-long visit counts across tasks
    smoothing_window: int = 20
    save_checkpoints: bool = True
    output_dir: str = "runs"
    params: AgentParams = field(default_factory=AgentParams)

    def __post_init__(self):
        self.agents = tuple(self.agents)
        self.seeds = tuple(int(s) for s in self.seeds)
        self.validate()

    def validate(self) -> None:
        if self.episodes_per_task < 1:
            raise ConfigError("episodes_per_task must be >= 1")
        if self.task_count < 1:
            raise ConfigError("task_count must be >= 1")
        if not self.agents:
            raise ConfigError("at least one agent is required")
        unknown = [a for a in self.agents if a not in AGENT_NAMES]
        if unknown:
            raise ConfigError(f"unknown agent(s) {unknown}; known: {', '.join(AGENT_NAMES)}")
        if len(set(self.agents)) != len(self.agents):
            raise ConfigError("duplicate agent names")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("duplicate seeds")
        if (self.size is not None and self.size < 1) or self.n_rooms < 1:
            raise ConfigError("size and n_rooms must be >= 1")
        if self.max_steps is not None and self.max_steps < 1:
            raise ConfigError("max_steps must be >= 1")
        if self.smoothing_window < 1:
            raise ConfigError("smoothing_window must be >= 1")
        if not self.run_id or any(c in self.run_id for c in "/\\"):
            raise ConfigError("run_id must be a nonempty name without path separators")
        p = self.params
        if p.optimizer not in ("sgd", "adam"):
            raise ConfigError("optimizer must be sgd or adam")
        if p.separation_form not in ("text", "printed"):
            raise ConfigError("separation_form must be text or printed")
        if p.beta < 0 or not 0 <= p.gamma < 1:
            raise ConfigError("need beta >= 0 and 0 <= gamma < 1")
        if p.embedding_dim < 2 or p.hidden < 1 or p.batch_size < 1 or p.t_freq < 1:
            raise ConfigError("embedding_dim >= 2, hidden, batch_size and t_freq >= 1 required")
        if p.w_margin <= 0:
            raise ConfigError("w_margin must be positive")
        try:
            build_env(self.grid())
        except (LayoutError, OSError) as exc:
            raise ConfigError(f"bad layout {self.layout!r}: {exc}") from None

    # ---- derived -------------------------------------------------------
    def grid(self) -> GridSpec:
        """Built-in layouts use their own default size when ``size`` is unset."""
        sized = {} if self.size is None else {"size": self.size}
        if self.layout in ("empty_room", "four_room"):
            return make_layout(self.layout, **sized)
        if self.layout == "multi_room":
            room = {} if self.size is None else {"room": self.size}
            return make_layout("multi_room", n_rooms=self.n_rooms, **room)
        return load_layout(self.layout)

    def episode_limit(self) -> int:
        if self.max_steps is not None:
            return self.max_steps
        kind = self.layout if self.layout in LAYOUT_KINDS else "custom"
        return DEFAULT_MAX_STEPS[kind]

    def output_path(self) -> Path:
        """``$EMBTRANSFER_OUTPUT_ROOT`` (when set) replaces ``output_dir``."""
        root = os.environ.get(OUTPUT_ROOT_ENV) or self.output_dir
        return Path(root) / self.run_id

    def to_text(self) -> str:
        lines = [f"{k} = {_format(v)}" for k, v in _flat_items(self)]
        return "\n".join(lines) + "\n"


# ---- parsing ---------------------------------------------------------------

_TOP = {f.name: f for f in fields(ExperimentConfig) if f.name != "params"}
_PARAMS = {f.name: f for f in fields(AgentParams)}

_INT = {"n_rooms", "task_count", "episodes_per_task", "smoothing_window",
        "embedding_dim", "hidden", "state_batch_size", "batch_size", "replay_capacity",
        "ac_replay_capacity", "t_freq", "target_sync"}
_OPT_INT = {"max_steps", "size"}
_OPT_FLOAT = {"embedding_lr", "target_beta"}
_BOOL = {"persist_counts", "save_checkpoints"}
_STR = {"run_id", "layout", "output_dir", "optimizer", "separation_form"}
_LIST_STR = {"agents"}
_LIST_INT = {"seeds"}


def _flat_items(cfg: ExperimentConfig):
    for name in _TOP:
        yield name, getattr(cfg, name)
    for name, value in asdict(cfg.params).items():
        yield name, value


def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (tuple, list)):
        return ", ".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _convert(key: str, raw: str):
    try:
        if key in _INT:
            return int(raw)
        if key in _OPT_INT:
            return None if raw.lower() == "none" else int(raw)
        if key in _OPT_FLOAT:
            return None if raw.lower() == "none" else float(raw)
        if key in _BOOL:
            low = raw.lower()
            if low not in ("true", "false"):
                raise ValueError(raw)
            return low == "true"
        if key in _STR:
            return raw
        if key in _LIST_STR:
            return tuple(v.strip() for v in raw.split(",") if v.strip())
        if key in _LIST_INT:
            return tuple(int(v) for v in raw.split(",") if v.strip())
        return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def parse_config_text(text: str, default_run_id: str = "run") -> ExperimentConfig:
    top, par, seen = {"run_id": default_run_id}, {}, set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        if key in _TOP:
            top[key] = _convert(key, raw)
        elif key in _PARAMS:
            par[key] = _convert(key, raw)
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return ExperimentConfig(params=AgentParams(**par), **top)


def parse_config(path, echo: bool = True) -> ExperimentConfig:
    """Read, validate and (by default) echo the resolved config into the output dir."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cfg = parse_config_text(path.read_text(), default_run_id=path.stem)
    if echo:
        write_resolved(cfg)
    return cfg


def write_resolved(cfg: ExperimentConfig) -> Path:
    out = cfg.output_path()
    out.mkdir(parents=True, exist_ok=True)
    dest = out / RESOLVED_NAME
    dest.write_text(cfg.to_text())
    return dest


def config_keys() -> List[str]:
    return list(_TOP) + list(_PARAMS)
