"""State embeddings shaped by the inferred binary dynamics.

The embedding network maps a one-hot state to ``phi(s)``.  It is trained only
through :func:`train_embedding_step`, which reads the tracker's state buffer
and neighbor sets and nothing else (no rewards, actions or value parameters).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .dynamics import DynamicsTracker
from .nn import DenseNet, OptimizerState, sgd_step

SEPARATION_FORMS = ("text", "printed")


class FrozenEmbeddingError(RuntimeError):
    pass


@dataclass(frozen=True)
class EmbeddingLossReport:
    L_s: float
    L_csc: float

    @property
    def total(self) -> float:
        return self.L_s + self.L_csc


class EmbeddingTable:
    """``phi(s) = g(onehot(s))`` with a dense network ``g``.

    A full ``|S| x d`` table is cached and refreshed lazily after every
    parameter change, so per-step lookups are cheap.
    """

    def __init__(self, n_states: int, dim: int = 10, hidden: int = 64,
                 rng: Optional[np.random.Generator] = None, net: Optional[DenseNet] = None):
        if dim < 2:
            raise ValueError("embedding dimension must be at least 2")
        self.n_states = n_states
        self.dim = dim
        if net is None:
            rng = rng if rng is not None else np.random.default_rng(0)
            sizes = [n_states, hidden, dim] if hidden else [n_states, dim]
            net = DenseNet.build(sizes, rng)
        if net.in_dim != n_states or net.out_dim != dim:
            raise ValueError("embedding network shape does not match (n_states, dim)")
        self.net = net
        self.frozen = False
        self._eye = np.eye(n_states)
        self._table: Optional[np.ndarray] = None

    def _check(self, s: int) -> None:
        if not 0 <= s < self.n_states:
            raise IndexError(f"state id {s} out of range [0, {self.n_states})")

    def invalidate(self) -> None:
        self._table = None

    def table(self) -> np.ndarray:
        if self._table is None:
            self._table = self.net.forward(self._eye, cache=False)
        return self._table

    def embed(self, s: int) -> np.ndarray:
        self._check(s)
        return self.table()[s].copy()

    def embed_batch(self, states: Sequence[int]) -> np.ndarray:
        return self.table()[np.asarray(states, dtype=np.int64)]

    def checksum(self) -> str:
        import hashlib
        return hashlib.sha256(self.net.flat().tobytes()).hexdigest()[:16]


def _similarity(Phi: np.ndarray, W: np.ndarray) -> Tuple[float, np.ndarray]:
    k = Phi.shape[0]
    if W.shape != (k, k):
        raise ValueError(f"W has shape {W.shape}, expected {(k, k)}")
    E = Phi @ Phi.T - W
    loss = float(np.mean(E * E))
    # d/dPhi of mean(E^2) with E = Phi Phi^T - W
    grad = (2.0 / (k * k)) * (E + E.T) @ Phi
    return loss, grad


def similarity_loss(Phi: np.ndarray, W: np.ndarray) -> float:
    """Mean squared entrywise gap between ``Phi Phi^T`` and the +/-1 target ``W``."""
    return _similarity(np.asarray(Phi, dtype=float), np.asarray(W, dtype=float))[0]


def similarity_loss_grad(Phi: np.ndarray, W: np.ndarray) -> np.ndarray:
    return _similarity(np.asarray(Phi, dtype=float), np.asarray(W, dtype=float))[1]


def _separation(Phi: np.ndarray, w_margin: float, form: str = "text",
                pair_mask: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray]:
    if w_margin <= 0:
        raise ValueError("w_margin must be positive")
    if form not in SEPARATION_FORMS:
        raise ValueError(f"unknown separation form {form!r}")
    k = Phi.shape[0]
    grad = np.zeros_like(Phi)
    iu, ju = np.triu_indices(k, 1)
    if pair_mask is not None:
        keep = pair_mask[iu, ju]
        iu, ju = iu[keep], ju[keep]
    if iu.size == 0:
        return 0.0, grad
    diff = Phi[iu] - Phi[ju]
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    if form == "text":
        hinge = w_margin - dist
        sign = -1.0
    else:
        hinge = dist - w_margin
        sign = 1.0
    active = hinge > 0
    loss = float(np.sum(hinge[active]) / iu.size)
    # zero distance has no direction; its subgradient is taken as 0
    ok = active & (dist > 0)
    unit = np.zeros_like(diff)
    unit[ok] = diff[ok] / dist[ok, None]
    contrib = sign * unit / iu.size
    np.add.at(grad, iu, contrib)
    np.add.at(grad, ju, -contrib)
    return loss, grad


def separation_loss(Phi: np.ndarray, w_margin: float, form: str = "text",
                    pair_mask: Optional[np.ndarray] = None) -> float:
    """Mean pairwise hinge over ``i < j``.

    ``form='text'`` penalizes pairs closer than ``w_margin``:
    ``max(w - ||phi_i - phi_j||, 0)``.  ``form='printed'`` is the mirrored
    ``max(||phi_i - phi_j|| - w, 0)``.
    """
    return _separation(np.asarray(Phi, dtype=float), w_margin, form, pair_mask)[0]


def separation_loss_grad(Phi: np.ndarray, w_margin: float, form: str = "text",
                         pair_mask: Optional[np.ndarray] = None) -> np.ndarray:
    return _separation(np.asarray(Phi, dtype=float), w_margin, form, pair_mask)[1]


def embedding_losses(Phi: np.ndarray, W: np.ndarray, w_margin: float, form: str = "text",
                     pair_mask: Optional[np.ndarray] = None):
    ls, gs = _similarity(Phi, W)
    lc, gc = _separation(Phi, w_margin, form, pair_mask)
    return EmbeddingLossReport(ls, lc), gs + gc


def train_embedding_step(table: EmbeddingTable, tracker: DynamicsTracker, batch_size: int,
                         w_margin: float, rng: np.random.Generator,
                         opt: Optional[OptimizerState] = None, loss_weight: float = 1.0,
                         form: str = "text") -> EmbeddingLossReport:
    """Sample a state batch, build its +/-1 target and take one step on ``g``.

    Pairs that repeat the same state (possible when the buffer is smaller
    than the batch) are left out of the separation term.
    """
    if table.frozen:
        raise FrozenEmbeddingError("embedding table is frozen")
    if len(tracker) == 0:
        raise ValueError("state buffer is empty")
    opt = opt if opt is not None else OptimizerState()
    batch = tracker.sample_state_batch(batch_size, rng)
    W = tracker.build_w_matrix(batch)
    ids = np.asarray(batch)
    mask = ids[:, None] != ids[None, :]
    onehots = table._eye[ids]
    Phi = table.net.forward(onehots)
    report, dPhi = embedding_losses(Phi, W, w_margin, form, mask)
    grads, _ = table.net.backward(dPhi)
    sgd_step(table.net, grads, opt, scale=loss_weight)
    table.invalidate()
    return report


def neighbor_margin(table: EmbeddingTable, oracle, states: Optional[Sequence[int]] = None) -> float:
    """Mean inner product over true-neighbor pairs minus mean over non-neighbor pairs.

    Self-loops are ignored; pairs are unordered and distinct.
    """
    states = list(range(table.n_states)) if states is None else list(states)
    Phi = table.embed_batch(states)
    G = Phi @ Phi.T
    pos = {s: i for i, s in enumerate(states)}
    adj = np.zeros_like(G, dtype=bool)
    for s in states:
        for t in oracle.get(s, ()):
            if t != s and t in pos:
                adj[pos[s], pos[t]] = adj[pos[t], pos[s]] = True
    iu, ju = np.triu_indices(len(states), 1)
    nb = adj[iu, ju]
    vals = G[iu, ju]
    return float(vals[nb].mean() - vals[~nb].mean())


def export_embedding_csv(table: EmbeddingTable, path, cells=None) -> None:
    """Rows ``state_id, x, y, phi_1..phi_d``; ``cells`` maps id -> (x, y)."""
    Phi = table.table()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["state_id", "x", "y"] + [f"phi_{i + 1}" for i in range(table.dim)])
        for s in range(table.n_states):
            x, y = cells[s] if cells is not None else ("", "")
            w.writerow([s, x, y] + [repr(float(v)) for v in Phi[s]])
