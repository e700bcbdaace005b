import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from embtransfer.gridworld import (
    ACTIONS, LEFT, RIGHT, UP, GridSpec, LayoutError, Task, build_env, edge_set,
    empty_room, four_room, goal_reward, load_layout, multi_room, parse_layout, sample_task,
    shortest_path_lengths, true_binary_dynamics,
)


def test_empty_room_has_100_states():
    env = build_env(empty_room(10))
    assert env.spec.width == env.spec.height == 12
    assert env.n_states == 100


def test_four_room_free_cells():
    spec = four_room(13)
    # 11x11 interior, minus a 21-cell cross, plus 4 doorways
    assert spec.to_text().count(".") == 104
    assert build_env(spec).n_states == 104


def test_multi_room_is_three_chained_rooms():
    env = build_env(multi_room(7, 3))
    assert env.n_states == 3 * 49 + 2


def test_goal_inside_wall_rejected():
    spec = empty_room(4)
    bad = GridSpec(spec.width, spec.height, spec.walls, "empty_room", start=(1, 1), goal=(0, 0))
    with pytest.raises(LayoutError):
        build_env(bad)


def test_disconnected_layout_rejected():
    text = "#####\n#.#.#\n#####\n"
    with pytest.raises(LayoutError, match="connected"):
        build_env(parse_layout(text))


def test_open_border_rejected():
    with pytest.raises(LayoutError, match="border"):
        build_env(parse_layout("###\n#..\n###\n"))


def test_layout_file_roundtrip(tmp_path):
    text = "#####\n#S..#\n#.#G#\n#####\n"
    path = tmp_path / "map.txt"
    path.write_text(text)
    spec = load_layout(path)
    assert spec.start == (1, 1) and spec.goal == (3, 2)
    assert spec.to_text() == text
    with pytest.raises(LayoutError, match="length"):
        parse_layout("####\n#.#\n####\n")


def test_step_mechanics():
    env = build_env(empty_room(10))
    s = env.state_of[(1, 1)]
    task = Task(s, env.state_of[(10, 10)], 500)
    env.reset(task)
    out = env.step(RIGHT)
    assert env.cells[out.next_state] == (2, 1)
    assert out.extrinsic_reward == 0.0 and not out.done and out.step_index == 1
    # wall bump keeps the agent in place
    assert env.move(s, UP) == s and env.move(s, LEFT) == s


def test_goal_reward_values():
    assert goal_reward(50, 500) == pytest.approx(0.91)
    assert goal_reward(500, 500) == pytest.approx(0.1)


def test_episode_ends_at_goal_and_at_budget():
    env = build_env(empty_room(3))
    a, b = env.state_of[(1, 1)], env.state_of[(2, 1)]
    env.reset(Task(a, b, 10))
    out = env.step(RIGHT)
    assert out.done and out.extrinsic_reward == pytest.approx(1 - 0.9 * 1 / 10)
    env.reset(Task(a, b, 3))
    outs = [env.step(UP) for _ in range(3)]
    assert [o.done for o in outs] == [False, False, True]
    assert all(o.extrinsic_reward == 0 for o in outs)
    with pytest.raises(RuntimeError):
        env.step(UP)


def test_sample_task_deterministic_and_needs_two_cells():
    env = build_env(empty_room(10))
    t1 = sample_task(env, np.random.default_rng(7))
    t2 = sample_task(env, np.random.default_rng(7))
    assert t1 == t2 and t1.start != t1.goal
    tiny = build_env(parse_layout("###\n#.#\n###\n"))
    with pytest.raises(LayoutError):
        sample_task(tiny, np.random.default_rng(0))


def test_sample_task_start_uniform():
    env = build_env(empty_room(10))
    rng = np.random.default_rng(123)
    counts = np.bincount([sample_task(env, rng).start for _ in range(10_000)], minlength=100)
    # chi-square with 99 dof: mean 99, sd ~14; 3 sd bound
    chi2 = np.sum((counts - 100) ** 2 / 100)
    assert chi2 < 99 + 3 * np.sqrt(2 * 99)
    assert counts.min() > 0


def _brute_force_edges(spec):
    free = set(spec.free_cells())
    order = spec.free_cells()
    idx = {c: i for i, c in enumerate(order)}
    edges = set()
    for (x, y) in order:
        for dx, dy in [(0, -1), (0, 1), (-1, 0), (1, 0)]:
            t = (x + dx, y + dy)
            edges.add((idx[(x, y)], idx[t] if t in free else idx[(x, y)]))
    return edges


def test_true_dynamics_matches_brute_force():
    for spec in (empty_room(10), four_room(13), multi_room()):
        env = build_env(spec)
        assert edge_set(true_binary_dynamics(env)) == _brute_force_edges(spec)
    # 360 ordered adjacent pairs + 36 boundary self-loops
    assert len(edge_set(true_binary_dynamics(build_env(empty_room(10))))) == 396


def test_interior_and_corner_neighbors():
    env = build_env(empty_room(10))
    dyn = true_binary_dynamics(env)
    mid = env.state_of[(5, 5)]
    assert len(dyn[mid]) == 4 and mid not in dyn[mid]
    corner = env.state_of[(1, 1)]
    assert corner in dyn[corner] and len(dyn[corner] - {corner}) == 2


@pytest.mark.parametrize("spec", [empty_room(10), four_room(13), multi_room()])
def test_move_edges_symmetric(spec):
    dyn = true_binary_dynamics(build_env(spec))
    for s, nbs in dyn.items():
        for t in nbs:
            if t != s:
                assert s in dyn[t]


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), actions=st.lists(st.sampled_from(ACTIONS), min_size=1, max_size=60))
def test_trajectories_are_deterministic_and_on_edges(seed, actions):
    env = build_env(four_room(13))
    task = sample_task(env, np.random.default_rng(seed), max_steps=40)
    dyn = true_binary_dynamics(env)

    def play():
        s = env.reset(task)
        outs = []
        for a in actions:
            out = env.step(a)
            assert out.next_state in dyn[s]
            outs.append(out)
            s = out.next_state
            if out.done:
                break
        return outs

    first = play()
    assert play() == first
    for out in first:
        assert out.extrinsic_reward == 0 or 0.1 <= out.extrinsic_reward < 1.0


def test_shorter_success_earns_more():
    rewards = [goal_reward(n, 500) for n in range(1, 501)]
    assert all(a > b for a, b in zip(rewards, rewards[1:]))


def test_shortest_path_bfs():
    env = build_env(empty_room(3))
    d = shortest_path_lengths(env, env.state_of[(3, 3)])
    assert d[env.state_of[(1, 1)]] == 4
    assert d[env.state_of[(3, 3)]] == 0
