"""
Learning a state embedding from the inferred graph
==================================================

The embedding network maps a one-hot state to a 10-dimensional vector.  It
is trained so that inner products match the +1/-1 neighbor matrix and
distinct states stay at least ``w`` apart.  Afterwards, grid neighbors have
larger inner products than non-neighbors.
"""

import tempfile
from pathlib import Path

import numpy as np

from embtransfer.dynamics import DynamicsTracker
from embtransfer.embedding import (
    EmbeddingTable, export_embedding_csv, neighbor_margin, train_embedding_step,
)
from embtransfer.gridworld import ACTIONS, build_env, empty_room, true_binary_dynamics
from embtransfer.nn import OptimizerState

env = build_env(empty_room(10))
oracle = true_binary_dynamics(env)

###############################################################################
# Fill the tracker with every transition

tracker = DynamicsTracker()
for s in range(env.n_states):
    for a in ACTIONS:
        tracker.observe(s, env.move(s, a))

###############################################################################
# Train with Adam on random state batches

table = EmbeddingTable(env.n_states, dim=10, hidden=64, rng=np.random.default_rng(0))
opt = OptimizerState(lr=1e-3, kind="adam")
rng = np.random.default_rng(1)
print(f"margin before training: {neighbor_margin(table, oracle):+.3f}")
for step in range(1, 3001):
    rep = train_embedding_step(table, tracker, 32, 0.5, rng, opt)
    if step % 1000 == 0:
        print(f"step {step}: L_s={rep.L_s:.3f} L_csc={rep.L_csc:.4f} "
              f"margin={neighbor_margin(table, oracle):+.3f}")

###############################################################################
# How much of the (x, y) position is linearly recoverable?

xy = np.array(env.cells, dtype=float)
Phi = np.c_[table.table(), np.ones(env.n_states)]
coef, *_ = np.linalg.lstsq(Phi, xy, rcond=None)
resid = xy - Phi @ coef
print(f"position R^2 from the embedding: {1 - resid.var(0).sum() / xy.var(0).sum():.2f}")

###############################################################################
# Export for plotting elsewhere

out = Path(tempfile.mkdtemp()) / "embedding.csv"
export_embedding_csv(table, out, env.cells)
print("wrote", out)
