import math

import pytest
from hypothesis import given, strategies as st

from embtransfer.intrinsic import RewardConfig, compound_reward, epsilon_at, intrinsic_reward


@pytest.mark.parametrize("n, d, expected", [(1, 1, 1.0), (4, 4, 0.25), (100, 1, 0.1)])
def test_intrinsic_reward_values(n, d, expected):
    assert intrinsic_reward(n, d) == pytest.approx(expected)


@pytest.mark.parametrize("n, d", [(0, 1), (1, 0), (-2, 3)])
def test_intrinsic_reward_rejects_bad_counts(n, d):
    with pytest.raises(ValueError):
        intrinsic_reward(n, d)


@given(n=st.integers(1, 10_000), d=st.integers(1, 50))
def test_intrinsic_reward_monotone_and_bounded(n, d):
    rho = intrinsic_reward(n, d)
    assert 0 < rho <= 1
    assert intrinsic_reward(n + 1, d) < rho
    assert intrinsic_reward(n, d + 1) < rho


def test_compound_reward():
    assert compound_reward(0.7, 0.9, 0.0) == 0.7
    assert compound_reward(0.91, 0.25, 0.1) == pytest.approx(0.935)
    assert compound_reward(0.0, 1.0, 0.1) == pytest.approx(0.1)


def test_epsilon_schedule():
    assert epsilon_at(0) == pytest.approx(1.0)
    assert epsilon_at(1) == pytest.approx(0.955)
    assert epsilon_at(500) == pytest.approx(0.1)
    assert all(epsilon_at(t) > epsilon_at(t + 1) > 0.1 for t in range(100))
    with pytest.raises(ValueError):
        epsilon_at(-1)


def test_reward_config_validation():
    cfg = RewardConfig()
    assert cfg.beta == 0.1 and cfg.epsilon(0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        RewardConfig(beta=-1)
    with pytest.raises(ValueError):
        RewardConfig(gamma=1.0)


def test_default_bonus_below_smallest_goal_reward():
    assert RewardConfig().beta * intrinsic_reward(1, 1) <= 1 - 0.9 * (500 / 500) + 1e-12
    assert math.isclose(RewardConfig().beta, 0.1)
