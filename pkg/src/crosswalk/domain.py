"""Core value types: the grid, agent action sets, joint states and scenarios."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

Cell = tuple[int, int]


class CarAction(enum.IntEnum):
    FORWARD = 0
    STOP = 1
    LEFT = 2
    RIGHT = 3


class PedestrianAction(enum.IntEnum):
    FORWARD = 0
    BACKWARDS = 1
    LEFT = 2
    RIGHT = 3
    WAIT = 4
    GET_IN_CAR = 5
    DONT_NOTICE_CAR = 6
    STOP = 7


# Unit displacements (dx, dy).  The car faces +x and the pedestrian faces -x;
# neither agent has an orientation that changes.
CAR_MOVES: dict[CarAction, Cell] = {
    CarAction.FORWARD: (1, 0),
    CarAction.STOP: (0, 0),
    CarAction.LEFT: (0, 1),
    CarAction.RIGHT: (0, -1),
}

PED_MOVES: dict[PedestrianAction, Cell] = {
    PedestrianAction.FORWARD: (-1, 0),
    PedestrianAction.BACKWARDS: (1, 0),
    PedestrianAction.LEFT: (0, -1),
    PedestrianAction.RIGHT: (0, 1),
}

PED_MOVEMENT_ACTIONS = tuple(PED_MOVES)


@dataclass(frozen=True)
class GridWorld:
    width: int = 7
    height: int = 7
    distance_cap: int = 6

    def __post_init__(self) -> None:
        if self.width < 2 or self.height < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.width}x{self.height}")
        if self.distance_cap <= 0:
            raise ValueError("distance_cap must be positive")

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    def contains(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def step(self, cell: Cell, delta: Cell) -> Cell:
        """Apply a unit move; a move that would leave the grid keeps the agent in place."""
        nxt = (cell[0] + delta[0], cell[1] + delta[1])
        return nxt if self.contains(nxt) else cell

    def index(self, cell: Cell) -> int:
        return cell[1] * self.width + cell[0]

    def cell(self, index: int) -> Cell:
        return (index % self.width, index // self.width)


@dataclass(frozen=True)
class JointState:
    car_pos: Cell
    ped_pos: Cell
    car_goal: Cell
    ped_goal: Cell
    ped_in_car: bool = False

    def validate(self, grid: GridWorld) -> None:
        for name in ("car_pos", "ped_pos", "car_goal", "ped_goal"):
            cell = getattr(self, name)
            if not grid.contains(cell):
                raise ValueError(f"{name}={cell} outside {grid.width}x{grid.height} grid")
        if self.ped_in_car and self.car_pos != self.ped_pos:
            raise ValueError("pedestrian in car must share the car's cell")


@dataclass(frozen=True)
class StopProfile:
    """Piecewise-constant stop probability keyed by distance.

    ``steps`` holds ``(max_distance, probability)`` pairs in increasing distance
    order; ``beyond`` applies past the last breakpoint.
    """

    steps: tuple[tuple[int, float], ...]
    beyond: float = 0.1

    def __post_init__(self) -> None:
        probs = [p for _, p in self.steps] + [self.beyond]
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("stop probabilities must lie in [0, 1]")
        if any(b > a for a, b in zip(probs, probs[1:])):
            raise ValueError("stop profile must be non-increasing in distance")
        dists = [d for d, _ in self.steps]
        if dists != sorted(set(dists)):
            raise ValueError("stop profile breakpoints must be strictly increasing")

    def __call__(self, distance: float) -> float:
        for max_d, prob in self.steps:
            if distance <= max_d:
                return prob
        return self.beyond

    @classmethod
    def from_mapping(cls, table: Mapping[int, float], beyond: float = 0.1) -> "StopProfile":
        return cls(tuple(sorted((int(k), float(v)) for k, v in table.items())), beyond)


@dataclass(frozen=True)
class Scenario:
    scenario_id: int
    name: str
    ics_enabled: bool
    prior_knowledge: bool
    distance_threshold: int
    trust_level: float
    stop_profile: StopProfile
    interaction_reward_base: float | None = None
    ped_predictability: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.ped_predictability <= 1.0:
            raise ValueError("ped_predictability must lie in [0, 1]")
        if not 0.0 <= self.trust_level <= 1.0:
            raise ValueError(f"trust_level {self.trust_level} outside [0, 1]")
        if self.distance_threshold < 0:
            raise ValueError("distance_threshold must be non-negative")
        if self.interaction_reward_base is None:
            object.__setattr__(self, "interaction_reward_base", -(1.0 - self.trust_level))


@dataclass(frozen=True)
class SurveyTable:
    """Post-survey scores per group, scaled so the maximum a group can give is 30."""

    questions: tuple[str, ...]
    scores: Mapping[int, tuple[int, ...]]
    max_points: int = 30

    def __post_init__(self) -> None:
        for group, row in self.scores.items():
            if len(row) != len(self.questions):
                raise ValueError(f"group {group}: expected {len(self.questions)} scores")
            if any(not 0 <= s <= self.max_points for s in row):
                raise ValueError(f"group {group}: scores must lie in [0, {self.max_points}]")

    def score(self, group: int, question: str) -> int:
        return self.scores[group][self.questions.index(question)]


TRUST_QUESTION = "I trust the communication of the car"

POST_SURVEY = SurveyTable(
    questions=(
        "Communication was adequate",
        "Communication was clear",
        "Communication was effective",
        TRUST_QUESTION,
        "I trust the car to make the appropriate actions",
        "I trust the car more because it communicates",
        "I trust the car more than a human driver",
        "I feel safe around the car",
    ),
    scores={
        1: (28, 28, 29, 27, 25, 28, 18, 22),
        2: (24, 26, 25, 25, 23, 22, 15, 21),
        3: (19, 9, 13, 9, 15, 8, 19, 15),
        4: (9, 7, 8, 6, 12, 6, 9, 11),
    },
)

# name, ics_enabled, prior_knowledge, threshold, stop table, predictability.
# The scenario id doubles as the survey group number.
_CANONICAL = {
    1: ("With ICS, prior knowledge", True, True, 1, {1: 0.9}, 0.6),
    2: ("With ICS, no prior knowledge", True, False, 3, {1: 0.9, 3: 0.7}, 0.0),
    3: ("Without ICS, prior knowledge", False, True, 1, {1: 0.9, 3: 0.3}, 0.0),
    4: ("Without ICS, no prior knowledge", False, False, 6, {1: 0.9, 6: 0.9}, 0.0),
}

# Interaction reward bases fitted by scripts/calibrate.py (seed 0, 2000 runs).
CALIBRATED_BASES: dict[int, float] = {1: -0.8784, 2: -0.09, 3: -2.0967, 4: -0.1076}


def canonical_scenarios(table: SurveyTable = POST_SURVEY) -> list[Scenario]:
    """The four ICS x prior-knowledge scenarios with trust taken from ``table``."""
    from crosswalk.survey import trust_level

    out = []
    for sid, (name, ics, prior, threshold, stops, predictability) in _CANONICAL.items():
        out.append(
            Scenario(
                scenario_id=sid,
                name=name,
                ics_enabled=ics,
                prior_knowledge=prior,
                distance_threshold=threshold,
                trust_level=trust_level(table.score(sid, TRUST_QUESTION), table.max_points),
                stop_profile=StopProfile.from_mapping(stops, beyond=0.1),
                interaction_reward_base=CALIBRATED_BASES.get(sid),
                ped_predictability=predictability,
            )
        )
    return out


@dataclass(frozen=True)
class ModelParams:
    """Reward shaping and discount constants shared by all scenarios."""

    gamma: float = 0.9
    phi: float = 0.95
    goal_reward: float = 1.0
    step_cost: float = -0.05
    collision_penalty: float = -2.0
    horizon: int = 10

    def __post_init__(self) -> None:
        for name in ("gamma", "phi"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
