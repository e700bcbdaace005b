"""
Grid worlds and the inferred transition graph
=============================================

Three built-in layouts, a random walk, and the neighbor map the tracker
infers from it.  The inferred map never contains an edge the environment
cannot produce, and an exhaustive sweep recovers it exactly.
"""

import numpy as np

from embtransfer.dynamics import DynamicsTracker
from embtransfer.gridworld import (
    ACTIONS, build_env, empty_room, four_room, multi_room, sample_task, true_binary_dynamics,
)

###############################################################################
# The layouts, as text maps

for spec in (empty_room(6), four_room(), multi_room()):
    env = build_env(spec)
    print(f"{spec.layout_kind}: {env.n_states} free cells")
    print(spec.to_text())

###############################################################################
# A random walk in the four-room layout

env = build_env(four_room())
rng = np.random.default_rng(0)
tracker = DynamicsTracker()
for ep in range(20):
    task = sample_task(env, rng)
    s = env.reset(task)
    tracker.start_episode(s)
    while not env.done:
        out = env.step(int(rng.integers(4)))
        tracker.observe(s, out.next_state)
        s = out.next_state

report = tracker.coverage_report(true_binary_dynamics(env))
print(f"after 20 random episodes: recall {report.edge_recall:.3f}, "
      f"spurious edges {report.spurious_edges}")

###############################################################################
# Exhaustive sweep: every (state, action) once

sweep = DynamicsTracker()
for s in range(env.n_states):
    for a in ACTIONS:
        sweep.observe(s, env.move(s, a))
print("sweep equals the true neighbor map:", sweep.neighbors == true_binary_dynamics(env))

###############################################################################
# Counts and episodic degree feed the exploration bonus

s = env.state_of[(1, 1)]
print(f"state {s} at (1, 1): N={tracker.count(s)}, d_e={tracker.episodic_degree(s)}")
