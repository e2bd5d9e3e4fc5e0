"""Pedestrian action probabilities from survey counts and trust scores."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Mapping

from crosswalk.domain import PED_MOVEMENT_ACTIONS, PedestrianAction

log = logging.getLogger(__name__)


class Category(str, enum.Enum):
    STOP = "stop"
    WAIT = "wait"
    CROSS = "cross"
    DONT_NOTICE = "dont_notice"
    GET_IN = "get_in"


RISKY = (Category.GET_IN, Category.DONT_NOTICE)
SAFE = (Category.WAIT, Category.STOP, Category.CROSS)

# Pre-survey response counts out of 50 participants, as percentages.
PRE_SURVEY_COUNTS: dict[Category, float] = {
    Category.STOP: 23,
    Category.WAIT: 22,
    Category.CROSS: 25,
    Category.DONT_NOTICE: 17,
    Category.GET_IN: 13,
}


@dataclass(frozen=True)
class ActionDistribution:
    probs: Mapping[Category, float]
    clamped: bool = False

    def __post_init__(self) -> None:
        missing = set(Category) - set(self.probs)
        if missing:
            raise ValueError(f"missing categories: {sorted(c.value for c in missing)}")
        if any(not 0.0 <= p <= 1.0 for p in self.probs.values()):
            raise ValueError("probabilities must lie in [0, 1]")
        total = sum(self.probs.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, expected 1")

    def __getitem__(self, cat: Category) -> float:
        return self.probs[cat]

    def as_tuple(self) -> tuple[float, ...]:
        """Probabilities in (stop, wait, cross, dont_notice, get_in) order."""
        return tuple(self.probs[c] for c in Category)

    def action_probs(self) -> dict[PedestrianAction, float]:
        """Expand survey categories onto the simulator's pedestrian actions.

        Crossing is split evenly over the four movement actions.
        """
        cross = self.probs[Category.CROSS] / len(PED_MOVEMENT_ACTIONS)
        out = {a: cross for a in PED_MOVEMENT_ACTIONS}
        out[PedestrianAction.WAIT] = self.probs[Category.WAIT]
        out[PedestrianAction.GET_IN_CAR] = self.probs[Category.GET_IN]
        out[PedestrianAction.DONT_NOTICE_CAR] = self.probs[Category.DONT_NOTICE]
        out[PedestrianAction.STOP] = self.probs[Category.STOP]
        return {a: out[a] for a in PedestrianAction}


def baseline_distribution(counts: Mapping[Category | str, float]) -> ActionDistribution:
    counts = {Category(k): float(v) for k, v in counts.items()}
    if any(v < 0 for v in counts.values()):
        raise ValueError("survey counts must be non-negative")
    total = sum(counts.values())
    if total <= 0:
        raise ValueError("empty survey")
    return ActionDistribution({c: counts.get(c, 0.0) / total for c in Category})


def trust_level(score: float, max_points: float = 30) -> float:
    if max_points <= 0:
        raise ValueError("max_points must be positive")
    if not 0 <= score <= max_points:
        raise ValueError(f"score {score} outside [0, {max_points}]")
    return score / max_points


def reweight(baseline: ActionDistribution, trust: float) -> ActionDistribution:
    """Shift probability toward the risky actions in proportion to trust.

    Get-in and don't-notice are scaled by ``1 + trust``; whatever is left is
    shared equally by wait, stop and cross.  At trust 0.9 on the pre-survey
    baseline this gives roughly (24, 32, 14, 14, 14) percent.
    """
    if not 0.0 <= trust <= 1.0:
        raise ValueError(f"trust {trust} outside [0, 1]")
    boosted = {c: baseline[c] * (1.0 + trust) for c in RISKY}
    risky_mass = sum(boosted.values())
    clamped = False
    if risky_mass >= 1.0:
        log.warning("reweight: risky mass %.3f >= 1 at trust %.3f, clamped", risky_mass, trust)
        boosted = {c: p / risky_mass for c, p in boosted.items()}
        risky_mass = 1.0
        clamped = True
    share = (1.0 - risky_mass) / len(SAFE)
    probs = {c: share for c in SAFE}
    probs.update(boosted)
    return ActionDistribution({c: probs[c] for c in Category}, clamped=clamped)
