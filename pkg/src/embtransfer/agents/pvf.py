"""Proto-value functions: smoothest Laplacian eigenvectors as fixed state features."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Mapping, Set

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .base import AgentParams
from .deep import DeepQAgent


@dataclass(frozen=True)
class PvfBasis:
    states: List[int]        # row order of ``vectors``
    values: np.ndarray       # ascending
    vectors: np.ndarray      # (len(states), d), orthonormal columns

    def features(self, n_states: int) -> np.ndarray:
        """Dense ``(n_states, d)`` table; states outside the graph get zeros."""
        out = np.zeros((n_states, self.vectors.shape[1]))
        out[self.states] = self.vectors
        return out


def graph_laplacian(adjacency: Mapping[int, Set[int]]):
    """Combinatorial ``L = D - A`` of the symmetrized graph, self-loops dropped."""
    states = sorted(set(adjacency) | {t for nbs in adjacency.values() for t in nbs})
    pos = {s: i for i, s in enumerate(states)}
    rows, cols = [], []
    for s, nbs in adjacency.items():
        for t in nbs:
            if t != s:
                rows += [pos[s], pos[t]]
                cols += [pos[t], pos[s]]
    n = len(states)
    A = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
    A.data[:] = 1.0  # duplicate entries were summed
    deg = np.asarray(A.sum(axis=1)).ravel()
    return states, (sp.diags(deg) - A).tocsr()


def pvf_basis(adjacency: Mapping[int, Set[int]], d: int) -> PvfBasis:
    """The ``d`` eigenpairs of smallest eigenvalue of the graph Laplacian.

    Uses shift-invert Lanczos (``eigsh``) followed by a Rayleigh-Ritz
    clean-up; falls back to a dense solve when ``d`` is close to the
    number of states.
    """
    states, L = graph_laplacian(adjacency)
    n = len(states)
    if d > n:
        raise ValueError(f"requested {d} eigenvectors from a graph with {n} states")
    if d >= n - 1:
        vals, vecs = np.linalg.eigh(L.toarray())
        return PvfBasis(states, vals[:d], vecs[:, :d])
    v0 = np.ones(n) / np.sqrt(n)
    _, V = eigsh(L, k=d, sigma=-1e-2, which="LM", v0=v0, tol=0)
    Q, _ = np.linalg.qr(V)
    vals, R = np.linalg.eigh(Q.T @ (L @ Q))
    vecs = Q @ R
    return PvfBasis(states, vals, vecs)


class PVFAgent(DeepQAgent):
    """Random-walk source phase, then a Q network over fixed PVF features.

    During the source task actions are uniform and nothing is learned; the
    tracker still records neighbors.  At the first target task the basis is
    computed from the inferred graph and frozen.
    """

    name = "pvf"

    def __init__(self, n_states, n_actions, tracker, params: AgentParams, seed=0, use_ir=False):
        self._pvf = None
        super().__init__(n_states, n_actions, tracker, params, seed, use_ir, learn_embedding=False)

    def features(self):
        if self._pvf is None:
            return np.zeros((self.n_states, self.params.embedding_dim))
        return self._pvf

    def act(self, s, epsilon):
        return super().act(s, 1.0 if self.task_index == 0 else epsilon)

    def train(self):
        if self.task_index == 0:
            return {}
        return super().train()

    def freeze_for_transfer(self):
        if self._pvf is None and self.tracker.neighbors:
            d = min(self.params.embedding_dim, len(self.tracker))
            basis = pvf_basis(self.tracker.neighbors, d)
            feats = basis.features(self.n_states)
            if d < self.params.embedding_dim:
                feats = np.pad(feats, ((0, 0), (0, self.params.embedding_dim - d)))
            self._pvf = feats
        super().freeze_for_transfer()
