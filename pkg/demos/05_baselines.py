"""
Baselines: successor representation and proto-value functions
==============================================================

The tabular SR keeps its occupancy matrix across tasks and relearns only
the reward weights.  PVFs are the smallest Laplacian eigenvectors of the
inferred graph and serve as fixed features.
"""

import numpy as np

from embtransfer.agents import ExperienceRecord, TabularSR, pvf_basis, sr_update
from embtransfer.gridworld import build_env, four_room, true_binary_dynamics

###############################################################################
# SR on a two-state cycle converges to (I - gamma P)^-1

sr = TabularSR(2)
for _ in range(2000):
    for s in (0, 1):
        sr_update(sr, ExperienceRecord(s, 0, 0.0, 0.0, 1 - s, False), alpha=0.2, gamma=0.5)
print("learned M:\n", sr.M.round(4))
print("closed form:\n", np.linalg.inv(np.eye(2) - 0.5 * np.array([[0, 1], [1, 0]])))

###############################################################################
# PVFs of the four-room graph

env = build_env(four_room())
basis = pvf_basis(true_binary_dynamics(env), 10)
print("smallest Laplacian eigenvalues:", basis.values.round(4))

# the second vector separates rooms; print its sign per cell
sign = np.sign(basis.features(env.n_states)[:, 1])
grid = np.full((env.spec.height, env.spec.width), " ")
for s, (x, y) in enumerate(env.cells):
    grid[y, x] = "+" if sign[s] > 0 else "-"
print("\n".join("".join(row) for row in grid))
