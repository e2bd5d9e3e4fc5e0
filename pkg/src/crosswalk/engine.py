"""Episode and Monte-Carlo batch execution."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from crosswalk.behavior import (
    CAR_GOAL,
    PED_GOAL,
    PED_IN_CAR,
    PedestrianModel,
    car_action,
    apply_actions,
    in_interaction,
    pedestrian_action,
    plan,
    step_reward,
    terminal_of,
)
from crosswalk.domain import CarAction, GridWorld, JointState, ModelParams, PedestrianAction, Scenario
from crosswalk.survey import PRE_SURVEY_COUNTS, ActionDistribution, baseline_distribution
from crosswalk.trust import TrustTrace, accumulate_trust

HORIZON_EXHAUSTED = "HorizonExhausted"

StartSampler = Callable[[GridWorld, np.random.Generator], JointState]


@dataclass(frozen=True)
class EpisodeResult:
    trace: TrustTrace
    steps_taken: int
    terminal: str
    seed: int
    car_actions: tuple[CarAction, ...] = ()
    ped_actions: tuple[PedestrianAction, ...] = ()
    interaction_steps: int = 0
    start: Optional[JointState] = None


@dataclass
class BatchResult:
    scenario_id: int
    runs: int
    mean_trace: np.ndarray
    trace_variance: np.ndarray
    mean_steps: float
    episodes: list[EpisodeResult] = field(default_factory=list, repr=False)

    @property
    def final_trust(self) -> float:
        return float(self.mean_trace[-1]) if len(self.mean_trace) else 0.0

    @property
    def variance_score(self) -> float:
        """Mean of the per-iteration variances; used to rank scenarios."""
        return float(np.mean(self.trace_variance)) if len(self.trace_variance) else 0.0


def default_start(grid: GridWorld, rng: Optional[np.random.Generator] = None) -> JointState:
    """Car at the left end of the middle row, pedestrian at the right end of the
    row below, goals swapped so the two must pass each other.

    The one-row offset keeps the agents from jumping straight from distance 2
    to distance 0 when both walk head-on.
    """
    row = grid.height // 2
    car, ped = (0, row), (grid.width - 1, row - 1)
    return JointState(car, ped, car_goal=ped, ped_goal=car)


def jittered_start(grid: GridWorld, rng: np.random.Generator) -> JointState:
    """Start rows drawn uniformly within the first and last columns."""
    car = (0, int(rng.integers(grid.height)))
    ped = (grid.width - 1, int(rng.integers(grid.height)))
    return JointState(car, ped, car_goal=ped, ped_goal=car)


def episode_seed(master_seed: int, scenario_id: int, run: int) -> int:
    return int(np.random.SeedSequence([master_seed, scenario_id, run]).generate_state(1)[0])


def run_episode(
    scenario: Scenario,
    grid: GridWorld,
    start: JointState,
    seed: int,
    params: ModelParams = ModelParams(),
    baseline: Optional[ActionDistribution] = None,
    car_policy: str = "plan",
) -> EpisodeResult:
    """Play one encounter until a terminal condition or the horizon.

    ``car_policy`` is ``"plan"`` (joint lookahead table) or ``"reactive"``
    (stop-probability sampling only).
    """
    start.validate(grid)
    if car_policy not in ("plan", "reactive"):
        raise ValueError(f"unknown car policy {car_policy!r}")
    if baseline is None:
        baseline = baseline_distribution(PRE_SURVEY_COUNTS)
    model = PedestrianModel.for_scenario(scenario, baseline)
    horizon = params.horizon
    rng = np.random.default_rng(seed)
    draws = rng.random((horizon, 2))

    joint = start
    terminal = terminal_of(joint)
    rewards: list[float] = []
    cars: list[CarAction] = []
    peds: list[PedestrianAction] = []
    interacting = 0
    if car_policy == "plan" and terminal is None:
        table = plan(grid, scenario, params, model, start.car_goal, start.ped_goal, horizon)
        interacting, terminal = _rollout_table(
            table, grid, start, draws[:, 0].tolist(), rewards, cars, peds
        )
    else:
        for t in range(horizon):
            if terminal is not None:
                break
            interacting += in_interaction(grid, scenario, joint)
            a1 = car_action(grid, scenario, joint, draws[t, 1])
            a2 = pedestrian_action(grid, scenario, model, joint, draws[t, 0])
            r = step_reward(grid, scenario, params, model, joint, a1, a2)
            joint_next, terminal = apply_actions(grid, joint, a1, a2)
            cars.append(a1)
            peds.append(a2)
            rewards.append(r)
            joint = joint_next
    if terminal is None:
        terminal = HORIZON_EXHAUSTED
    return EpisodeResult(
        trace=accumulate_trust(rewards, params.phi),
        steps_taken=len(rewards),
        terminal=terminal,
        seed=seed,
        car_actions=tuple(cars),
        ped_actions=tuple(peds),
        interaction_steps=interacting,
        start=start,
    )


_CARS = list(CarAction)
_PEDS = list(PedestrianAction)


def _rollout_table(table, grid, start, us, rewards, cars, peds):
    """Planned rollout on integer states; appends to the given lists in place."""
    st = table.stepper()
    s = table.state_index(grid, start)
    car_goal = grid.index(start.car_goal)
    horizon = len(us)
    interacting = 0
    for t in range(horizon):
        interacting += st.active[s]
        a1, a2, s, r, cont = st.step(s, horizon - t, us[t])
        cars.append(_CARS[a1])
        peds.append(_PEDS[a2])
        rewards.append(r)
        if not cont:
            if a2 == PedestrianAction.GET_IN_CAR:
                return interacting, PED_IN_CAR
            return interacting, CAR_GOAL if s // st.n_cells == car_goal else PED_GOAL
    return interacting, None


def _run_range(args) -> list[EpisodeResult]:
    scenario, grid, params, baseline, sampler, master_seed, lo, hi, car_policy = args
    out = []
    for run in range(lo, hi):
        seed = episode_seed(master_seed, scenario.scenario_id, run)
        start_rng = np.random.default_rng([seed, 1])
        start = sampler(grid, start_rng)
        out.append(run_episode(scenario, grid, start, seed, params, baseline, car_policy))
    return out


def aggregate(scenario_id: int, episodes: Sequence[EpisodeResult], horizon: int) -> BatchResult:
    if not episodes:
        empty = np.zeros(horizon)
        return BatchResult(scenario_id, 0, empty, empty.copy(), 0.0, [])
    padded = np.array([ep.trace.padded(horizon) for ep in episodes])
    return BatchResult(
        scenario_id=scenario_id,
        runs=len(episodes),
        mean_trace=padded.mean(axis=0),
        trace_variance=padded.var(axis=0),
        mean_steps=float(np.mean([ep.steps_taken for ep in episodes])),
        episodes=list(episodes),
    )


def run_batch(
    scenario: Scenario,
    grid: GridWorld = GridWorld(),
    start_sampler: StartSampler = default_start,
    runs: int = 2000,
    master_seed: int = 0,
    params: ModelParams = ModelParams(),
    baseline: Optional[ActionDistribution] = None,
    jobs: int = 1,
    car_policy: str = "plan",
) -> BatchResult:
    """Run ``runs`` independent episodes and average their padded trust traces.

    Each episode's seed depends only on (master_seed, scenario id, run index),
    so the result does not depend on ``jobs``.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if baseline is None:
        baseline = baseline_distribution(PRE_SURVEY_COUNTS)
    jobs = max(1, min(jobs, runs))
    bounds = np.linspace(0, runs, jobs + 1).astype(int)
    chunks = [
        (scenario, grid, params, baseline, start_sampler, master_seed, lo, hi, car_policy)
        for lo, hi in zip(bounds[:-1], bounds[1:])
    ]
    if jobs == 1:
        episodes = _run_range(chunks[0])
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            episodes = [ep for part in pool.map(_run_range, chunks) for ep in part]
    return aggregate(scenario.scenario_id, episodes, params.horizon)
