"""Online inference of the binary transition structure from observed trajectories.

The tracker stores neighbor sets as hash-indexed adjacency, never a dense
``|S| x |S|`` matrix.  A dense +/-1 target is materialized only for a sampled
batch of states (:meth:`DynamicsTracker.build_w_matrix`).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set

import numpy as np

from .gridworld import GridEnv, NeighborMap, edge_set


@dataclass(frozen=True)
class CoverageReport:
    edge_recall: float
    spurious_edges: int


class DynamicsTracker:
    """Neighbor sets, life-long visit counts, episodic neighborhoods, state buffer.

    Visits are counted on arrival (``observe`` bumps ``N(s_next)``) and at
    episode start (``start_episode`` bumps ``N(s0)``), so every state that has
    ever been occupied has ``N >= 1`` by the time its intrinsic reward is read.
    """

    def __init__(self):
        self.neighbors: Dict[int, Set[int]] = {}
        self.counts: Dict[int, int] = {}
        self._episodic: Dict[int, Set[int]] = {}
        self._buffer: List[int] = []
        self._in_buffer: Set[int] = set()

    # ---- counters -------------------------------------------------------
    def _register(self, s: int) -> None:
        if s not in self._in_buffer:
            self._in_buffer.add(s)
            self._buffer.append(s)

    def visit(self, s: int) -> None:
        self.counts[s] = self.counts.get(s, 0) + 1
        self._register(s)

    def start_episode(self, s0: int) -> None:
        self.episodic_reset()
        self.visit(s0)

    def observe(self, s: int, s_next: int) -> None:
        """Record transition ``s -> s_next``."""
        if s not in self.counts:
            # first sighting outside start_episode still counts as a visit
            self.visit(s)
        self.visit(s_next)
        self.neighbors.setdefault(s, set()).add(s_next)
        self._episodic.setdefault(s, set()).add(s_next)

    def episodic_reset(self) -> None:
        self._episodic.clear()

    def count(self, s: int) -> int:
        return self.counts.get(s, 0)

    def episodic_degree(self, s: int) -> int:
        """``d^e(s)``: 1 plus the neighbors of ``s`` found this episode."""
        return 1 + len(self._episodic.get(s, ()))

    @property
    def buffer(self) -> List[int]:
        return list(self._buffer)

    def __len__(self) -> int:
        return len(self._buffer)

    # ---- batches --------------------------------------------------------
    def sample_state_batch(self, k: int, rng: np.random.Generator) -> List[int]:
        n = len(self._buffer)
        if n == 0:
            raise ValueError("state buffer is empty")
        idx = rng.choice(n, size=k, replace=k > n)
        return [self._buffer[i] for i in idx]

    def build_w_matrix(self, batch: Sequence[int]) -> np.ndarray:
        """Symmetrized +1/-1 adjacency target for ``batch`` with a +1 diagonal."""
        if len(batch) == 0:
            raise ValueError("batch must be nonempty")
        k = len(batch)
        W = -np.ones((k, k))
        empty: Set[int] = set()
        for i, si in enumerate(batch):
            nbs = self.neighbors.get(si, empty)
            for j, sj in enumerate(batch):
                if sj in nbs:
                    W[i, j] = W[j, i] = 1.0
        np.fill_diagonal(W, 1.0)
        return W

    # ---- analysis -------------------------------------------------------
    def coverage_report(self, oracle: NeighborMap) -> CoverageReport:
        inferred = edge_set(self.neighbors)
        true = edge_set(oracle)
        recall = len(inferred & true) / len(true) if true else 1.0
        return CoverageReport(recall, len(inferred - true))

    def snapshot_records(self, env: Optional[GridEnv] = None) -> Iterable[dict]:
        ids = sorted(set(self.counts) | set(self.neighbors))
        for s in ids:
            rec = {"id": s, "N": self.count(s), "d_e": self.episodic_degree(s),
                   "neighbors": sorted(self.neighbors.get(s, ()))}
            if env is not None:
                rec["x"], rec["y"] = env.cells[s]
            yield rec

    def save_snapshot(self, path, env: Optional[GridEnv] = None) -> None:
        """Write one JSON record per known state (JSON-lines)."""
        with open(path, "w") as fh:
            for rec in self.snapshot_records(env):
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    @classmethod
    def load_snapshot(cls, path) -> "DynamicsTracker":
        tracker = cls()
        for line in Path(path).read_text().splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            s = int(rec["id"])
            if rec["N"] > 0:
                tracker.counts[s] = int(rec["N"])
                tracker._register(s)
            if rec["neighbors"]:
                tracker.neighbors[s] = set(rec["neighbors"])
        return tracker


def read_snapshot(path) -> List[dict]:
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]
