"""Reward and trust-quantification arithmetic.

Everything here is a pure function of its arguments.  The discount subscripts
are applied as geometric powers (gamma**i, phi**j) with the first term
undiscounted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from crosswalk.domain import Cell


def proximity(s1: Cell, s2: Cell, cap: int) -> int:
    """Manhattan distance between two cells, clamped to ``cap``."""
    return min(abs(s1[0] - s2[0]) + abs(s1[1] - s2[1]), cap)


def theta(p_next: float, obs: float, d: float) -> float:
    return p_next * obs * d


def individual_reward(
    s: Cell,
    nxt: Cell,
    goal: Cell,
    *,
    goal_reward: float = 1.0,
    step_cost: float = -0.05,
) -> float:
    """Reward for one agent moving from ``s`` to ``nxt``.

    Holding position on the goal is free, arriving on it pays ``goal_reward``,
    and every other step (including standing still elsewhere) costs
    ``step_cost``.
    """
    if s == goal and nxt == goal:
        return 0.0
    if nxt == goal:
        return goal_reward
    return step_cost


def transition_reward(
    car_rewards: Sequence[float], ped_rewards: Sequence[float], gamma: float
) -> float:
    """Discounted sum of both agents' individual rewards along a trajectory."""
    if len(car_rewards) != len(ped_rewards):
        raise ValueError(
            f"trajectory lengths differ: {len(car_rewards)} vs {len(ped_rewards)}"
        )
    total = 0.0
    for i, (r1, r2) in enumerate(zip(car_rewards, ped_rewards)):
        total += gamma**i * r1 + gamma**i * r2
    return total


def interaction_reward(
    d: float,
    threshold: float,
    p_car: float,
    p_ped: float,
    r_car: float,
    r_ped: float,
    base: float,
    obs: float = 1.0,
) -> float:
    """Trust-weighted interaction reward for one joint action.

    Zero when the agents are further apart than ``threshold``.  The
    observation term defaults to 1 since the joint observation fixes the state.
    """
    if d > threshold:
        return 0.0
    return theta(p_car, obs, d) * (r_car + base) + theta(p_ped, obs, d) * (r_ped + base)


@dataclass(frozen=True)
class TrustTrace:
    values: tuple[float, ...]
    running: tuple[float, ...]

    @property
    def cumulative(self) -> float:
        return self.running[-1] if self.running else 0.0

    def __len__(self) -> int:
        return len(self.values)

    def padded(self, length: int) -> list[float]:
        """Running trust padded to ``length`` by repeating the final value."""
        if len(self.running) > length:
            raise ValueError(f"trace of length {len(self.running)} exceeds {length}")
        return list(self.running) + [self.cumulative] * (length - len(self.running))


def accumulate_trust(interaction_rewards: Sequence[float], phi: float) -> TrustTrace:
    if not 0.0 <= phi <= 1.0:
        raise ValueError(f"phi={phi} outside [0, 1]")
    values = tuple(phi**j * r for j, r in enumerate(interaction_rewards))
    return TrustTrace(values, tuple(itertools.accumulate(values)))
