import pytest

from crosswalk.trust import (
    accumulate_trust,
    individual_reward,
    interaction_reward,
    proximity,
    theta,
    transition_reward,
)


@pytest.mark.parametrize(
    "a,b,expected", [((2, 2), (2, 2), 0), ((0, 0), (2, 3), 5), ((0, 0), (6, 6), 6)]
)
def test_proximity(a, b, expected):
    assert proximity(a, b, 6) == expected


def test_theta():
    assert theta(0.7, 1.0, 3) == pytest.approx(2.1)
    assert theta(0.123, 0.5, 0) == 0
    assert theta(1.0, 1.0, 6) == 6


def test_individual_reward_cases():
    assert individual_reward((5, 3), (6, 3), (6, 3)) == 1.0
    assert individual_reward((3, 3), (3, 3), (0, 0)) == -0.05
    assert individual_reward((6, 3), (6, 3), (6, 3)) == 0.0


def test_transition_reward():
    assert transition_reward([], [], 0.9) == 0
    assert transition_reward([1.0], [1.0], 1.0) == 2
    assert transition_reward([1.0, -0.05], [-0.05, 1.0], 0.5) == pytest.approx(1.425)
    with pytest.raises(ValueError, match="lengths differ"):
        transition_reward([1.0], [], 0.9)


def test_interaction_reward_examples():
    assert interaction_reward(0, 1, 0.9, 0.25, -0.05, -0.05, -0.1) == 0
    assert interaction_reward(1, 1, 0.9, 0.25, -0.05, -0.05, -0.1) == pytest.approx(-0.1725)
    assert interaction_reward(2, 1, 0.9, 0.25, -0.05, -0.05, -0.1) == 0


def test_interaction_reward_zero_outside_threshold_everywhere():
    cells = [(x, y) for x in range(7) for y in range(7)]
    for a in cells:
        for b in cells:
            d = proximity(a, b, 6)
            if d > 3:
                assert interaction_reward(d, 3, 0.5, 0.5, 1.0, 1.0, -0.3) == 0.0


@pytest.mark.parametrize("h", [1e-3, 1e-4, 1e-5])
def test_interaction_reward_linear_in_probabilities(h):
    # finite differences along each probability equal the analytic slope
    d, r1, r2, base = 3, -0.05, 1.0, -0.4
    f = lambda p1, p2: interaction_reward(d, 6, p1, p2, r1, r2, base)  # noqa: E731
    p1, p2 = 0.3, 0.6
    assert (f(p1 + h, p2) - f(p1, p2)) / h == pytest.approx(d * (r1 + base), rel=1e-6)
    assert (f(p1, p2 + h) - f(p1, p2)) / h == pytest.approx(d * (r2 + base), rel=1e-6)
    # second difference vanishes
    assert f(p1 + 2 * h, p2) - 2 * f(p1 + h, p2) + f(p1, p2) == pytest.approx(0.0, abs=1e-12)


def test_accumulate_trust():
    empty = accumulate_trust([], 0.95)
    assert len(empty) == 0 and empty.cumulative == 0
    assert accumulate_trust([-1, -1], 1.0).cumulative == -2
    assert accumulate_trust([-0.2, -0.1, 0.05], 0.5).cumulative == pytest.approx(-0.2375)
    with pytest.raises(ValueError):
        accumulate_trust([1.0], 1.5)


def test_negative_rewards_give_nonincreasing_trace():
    tr = accumulate_trust([-0.3, -0.01, -0.2, -0.05], 0.9)
    assert all(b <= a for a, b in zip(tr.running, tr.running[1:]))


def test_padding():
    tr = accumulate_trust([-0.1, -0.2, -0.3], 1.0)
    assert tr.padded(5) == pytest.approx([-0.1, -0.3, -0.6, -0.6, -0.6])
    with pytest.raises(ValueError):
        tr.padded(2)
