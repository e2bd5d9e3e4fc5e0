"""Agent decision making.

The car is planned, the pedestrian is sampled.  Inside the interaction range
the car picks the car half of the joint action that maximises the
accumulated interaction reward over the remaining horizon (a finite-horizon
joint lookahead, solved once per scenario as a policy table over every
car/pedestrian cell pair).  Outside that range both agents walk straight for
their goals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from crosswalk.domain import (
    CAR_MOVES,
    PED_MOVEMENT_ACTIONS,
    PED_MOVES,
    CarAction,
    GridWorld,
    JointState,
    ModelParams,
    PedestrianAction,
    Scenario,
)
from crosswalk.survey import ActionDistribution, reweight
from crosswalk.trust import individual_reward, interaction_reward, proximity

CAR_MOVEMENT_ACTIONS = tuple(a for a in CarAction if a is not CarAction.STOP)

CAR_GOAL, PED_GOAL, PED_IN_CAR = "CarGoal", "PedGoal", "PedInCar"


def _manhattan(a, b) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def car_goal_moves(grid: GridWorld, car, goal) -> list[CarAction]:
    """Car moves that bring it strictly closer to its goal, in enum order."""
    here = _manhattan(car, goal)
    return [a for a in CAR_MOVEMENT_ACTIONS if _manhattan(grid.step(car, CAR_MOVES[a]), goal) < here]


def car_goal_step(grid: GridWorld, car, goal) -> CarAction:
    moves = car_goal_moves(grid, car, goal)
    return moves[0] if moves else CarAction.STOP


def ped_goal_step(grid: GridWorld, ped, goal) -> PedestrianAction:
    here = _manhattan(ped, goal)
    for a in PED_MOVEMENT_ACTIONS:
        if _manhattan(grid.step(ped, PED_MOVES[a]), goal) < here:
            return a
    return PedestrianAction.WAIT


@dataclass(frozen=True)
class PedestrianModel:
    """Pedestrian action probabilities in ``PedestrianAction`` order.

    ``predictability`` is the chance the pedestrian simply keeps walking toward
    its goal while interacting; the rest of the mass follows ``probs``.
    """

    probs: tuple[float, ...]
    predictability: float = 0.0

    @classmethod
    def from_distribution(cls, dist: ActionDistribution, predictability: float = 0.0) -> "PedestrianModel":
        expanded = dist.action_probs()
        return cls(tuple(expanded[a] for a in PedestrianAction), predictability)

    @classmethod
    def for_scenario(cls, scenario: Scenario, baseline: ActionDistribution) -> "PedestrianModel":
        # Intent communication narrows the pedestrian toward the trust-weighted
        # distribution; without it the raw survey baseline is used.
        dist = reweight(baseline, scenario.trust_level) if scenario.ics_enabled else baseline
        return cls.from_distribution(dist, scenario.ped_predictability)

    def survey_probs(self, d: int) -> tuple[float, ...]:
        """Survey probabilities at distance ``d``; getting in needs the car within one cell."""
        if d <= 1:
            return self.probs
        rest = [0.0 if a is PedestrianAction.GET_IN_CAR else p for a, p in zip(PedestrianAction, self.probs)]
        total = sum(rest)
        if total <= 0.0:
            # only getting in was possible; fall back to waiting
            return tuple(1.0 if a is PedestrianAction.WAIT else 0.0 for a in PedestrianAction)
        # divide by the actual remainder, not 1 - p_in, which cancels badly near 1
        return tuple(p / total for p in rest)

    def effective(self, d: int, goal_action: PedestrianAction) -> tuple[float, ...]:
        """Action probabilities while interacting at distance ``d``."""
        c = self.predictability
        survey = self.survey_probs(d)
        if c == 0.0:
            return survey
        return tuple(
            (1.0 - c) * p + (c if a is goal_action else 0.0)
            for a, p in zip(PedestrianAction, survey)
        )


def car_action_probs(grid: GridWorld, scenario: Scenario, joint: JointState) -> dict[CarAction, float]:
    """Probability the car takes each action from ``joint``.

    The car stops with the scenario's distance-dependent stop probability and
    otherwise takes one of its goal-approaching moves.  Actions absent from
    the result have probability zero.
    """
    moves = car_goal_moves(grid, joint.car_pos, joint.car_goal)
    if not moves:
        return {CarAction.STOP: 1.0}
    d = proximity(joint.car_pos, joint.ped_pos, grid.distance_cap)
    p_stop = scenario.stop_profile(d)
    out = {CarAction.STOP: p_stop}
    for a in moves:
        out[a] = (1.0 - p_stop) / len(moves)
    return {a: out[a] for a in CarAction if a in out}


def in_interaction(grid: GridWorld, scenario: Scenario, joint: JointState) -> bool:
    return proximity(joint.car_pos, joint.ped_pos, grid.distance_cap) <= scenario.distance_threshold


def car_action(grid: GridWorld, scenario: Scenario, joint: JointState, u: float) -> CarAction:
    """Sample the car's reactive action from a uniform draw ``u`` in [0, 1).

    Stops with the stop-profile probability while interacting, otherwise
    takes the first goal-approaching move.
    """
    if joint.car_pos == joint.car_goal:
        return CarAction.STOP
    if in_interaction(grid, scenario, joint):
        d = proximity(joint.car_pos, joint.ped_pos, grid.distance_cap)
        if u < scenario.stop_profile(d):
            return CarAction.STOP
    return car_goal_step(grid, joint.car_pos, joint.car_goal)


def sample_index(probs, u: float) -> int:
    acc = 0.0
    last = 0
    for i, p in enumerate(probs):
        if p <= 0.0:
            continue
        acc += p
        last = i
        if u < acc:
            return i
    return last


def pedestrian_action(
    grid: GridWorld, scenario: Scenario, model: PedestrianModel, joint: JointState, u: float
) -> PedestrianAction:
    if not in_interaction(grid, scenario, joint):
        return ped_goal_step(grid, joint.ped_pos, joint.ped_goal)
    d = proximity(joint.car_pos, joint.ped_pos, grid.distance_cap)
    goal_action = ped_goal_step(grid, joint.ped_pos, joint.ped_goal)
    return PedestrianAction(sample_index(model.effective(d, goal_action), u))


def apply_actions(
    grid: GridWorld, joint: JointState, a1: CarAction, a2: PedestrianAction
) -> tuple[JointState, Optional[str]]:
    """Move both agents and report which terminal condition, if any, was hit."""
    car_next = grid.step(joint.car_pos, CAR_MOVES[a1])
    in_car = False
    if a2 is PedestrianAction.GET_IN_CAR:
        ped_next, in_car = car_next, True
    elif a2 is PedestrianAction.DONT_NOTICE_CAR:
        step = ped_goal_step(grid, joint.ped_pos, joint.ped_goal)
        ped_next = grid.step(joint.ped_pos, PED_MOVES.get(step, (0, 0)))
    else:
        ped_next = grid.step(joint.ped_pos, PED_MOVES.get(a2, (0, 0)))
    nxt = JointState(car_next, ped_next, joint.car_goal, joint.ped_goal, in_car)
    return nxt, terminal_of(nxt)


def terminal_of(joint: JointState) -> Optional[str]:
    if joint.ped_in_car:
        return PED_IN_CAR
    if joint.car_pos == joint.car_goal:
        return CAR_GOAL
    if joint.ped_pos == joint.ped_goal:
        return PED_GOAL
    return None


def step_reward(
    grid: GridWorld,
    scenario: Scenario,
    params: ModelParams,
    model: PedestrianModel,
    joint: JointState,
    a1: CarAction,
    a2: PedestrianAction,
) -> float:
    """Interaction reward for one joint action taken from ``joint``."""
    d = proximity(joint.car_pos, joint.ped_pos, grid.distance_cap)
    if d > scenario.distance_threshold:
        return 0.0
    nxt, _ = apply_actions(grid, joint, a1, a2)
    r_car = individual_reward(
        joint.car_pos, nxt.car_pos, joint.car_goal,
        goal_reward=params.goal_reward, step_cost=params.step_cost,
    )
    if a1 is not CarAction.STOP and nxt.car_pos == joint.ped_pos:
        r_car += params.collision_penalty
    r_ped = individual_reward(
        joint.ped_pos, nxt.ped_pos, joint.ped_goal,
        goal_reward=params.goal_reward, step_cost=params.step_cost,
    )
    if (
        a2 is not PedestrianAction.GET_IN_CAR
        and nxt.ped_pos != joint.ped_pos
        and nxt.ped_pos == joint.car_pos
    ):
        r_ped += params.collision_penalty
    p_car = car_action_probs(grid, scenario, joint).get(a1, 0.0)
    p_ped = model.effective(d, ped_goal_step(grid, joint.ped_pos, joint.ped_goal))[a2]
    return interaction_reward(
        d, scenario.distance_threshold, p_car, p_ped, r_car, r_ped,
        scenario.interaction_reward_base,
    )


def feasible_actions(
    grid: GridWorld, scenario: Scenario, model: PedestrianModel, joint: JointState
) -> tuple[list[CarAction], list[PedestrianAction]]:
    """Joint actions considered while interacting: those with nonzero probability."""
    d = proximity(joint.car_pos, joint.ped_pos, grid.distance_cap)
    cars = list(car_action_probs(grid, scenario, joint))
    eff = model.effective(d, ped_goal_step(grid, joint.ped_pos, joint.ped_goal))
    peds = [a for a in PedestrianAction if eff[a] > 0.0]
    return cars, peds


# ---------------------------------------------------------------------------
# Policy tables


@dataclass(frozen=True)
class PolicyTable:
    """Car action for every (car cell, pedestrian cell) pair and lookahead depth.

    ``car_actions[k, s]`` is the car's choice with ``k`` steps left, where
    ``s = car_index * n_cells + ped_index``.  Row 0 is unused.
    """

    car_actions: np.ndarray
    values: np.ndarray
    n_cells: int
    arrays: Optional[dict] = field(default=None, repr=False, compare=False)

    def lookup(self, grid: GridWorld, joint: JointState, steps_left: int) -> CarAction:
        s = grid.index(joint.car_pos) * self.n_cells + grid.index(joint.ped_pos)
        return CarAction(int(self.car_actions[steps_left, s]))

    def state_index(self, grid: GridWorld, joint: JointState) -> int:
        return grid.index(joint.car_pos) * self.n_cells + grid.index(joint.ped_pos)

    def stepper(self) -> "TableStepper":
        """Plain-list view of the transition arrays for fast episode rollout."""
        if self.arrays is None:
            raise ValueError("table was built without transition arrays")
        cached = self.arrays.get("stepper")
        if cached is None:
            cached = self.arrays["stepper"] = TableStepper(self)
        return cached


class TableStepper:
    """Integer-state rollout over a policy table.

    Gives the same actions, rewards and successors as ``joint_policy_step``
    (the transition arrays are built with the same float association as the
    scalar reward path) at a fraction of the cost.
    """

    def __init__(self, table: PolicyTable) -> None:
        a = table.arrays
        self.n_cells = table.n_cells
        self.actions = table.car_actions.tolist()
        self.reward = a["reward"].tolist()
        self.succ = a["succ"].tolist()
        self.cont = a["cont"].tolist()
        self.active = a["active"].tolist()
        self.car_gs = a["car_gs"].tolist()
        self.ped_gs = a["ped_gs"].tolist()
        self.ped_cum = np.cumsum(np.where(a["p_ped"] > 0.0, a["p_ped"], 0.0), axis=0).T.tolist()
        self.ped_last = (7 - np.argmax(a["p_ped"][::-1] > 0.0, axis=0)).tolist()
        self.ped_pos = (a["p_ped"].T > 0.0).tolist()

    def sample_ped(self, s: int, u: float) -> int:
        cum = self.ped_cum[s]
        pos = self.ped_pos[s]
        for i in range(8):
            if pos[i] and u < cum[i]:
                return i
        return self.ped_last[s]

    def step(self, s: int, steps_left: int, u: float) -> tuple[int, int, int, float, bool]:
        """One iteration from state ``s``: (a1, a2, next state, reward, continues)."""
        if self.active[s]:
            a1 = self.actions[steps_left][s]
            a2 = self.sample_ped(s, u)
        else:
            a1, a2 = self.car_gs[s], self.ped_gs[s]
        return a1, a2, self.succ[s][a1][a2], self.reward[s][a1][a2], self.cont[s][a1][a2]


def _transition_arrays(grid, scenario, params, model, car_goal, ped_goal):
    """Per-state reward, successor and feasibility arrays for all 4x8 joint actions."""
    n = grid.n_cells
    xs = np.arange(n) % grid.width
    ys = np.arange(n) // grid.width
    car = np.repeat(np.arange(n), n)
    ped = np.tile(np.arange(n), n)
    cx, cy, px, py = xs[car], ys[car], xs[ped], ys[ped]
    gcx, gcy = car_goal
    gpx, gpy = ped_goal

    def move(x, y, delta):
        nx, ny = x + delta[0], y + delta[1]
        ok = (nx >= 0) & (nx < grid.width) & (ny >= 0) & (ny < grid.height)
        return np.where(ok, nx, x), np.where(ok, ny, y)

    dist = np.minimum(np.abs(cx - px) + np.abs(cy - py), grid.distance_cap)
    active = dist <= scenario.distance_threshold
    car_dist = np.abs(cx - gcx) + np.abs(cy - gcy)
    ped_dist = np.abs(px - gpx) + np.abs(py - gpy)

    # car moves and goal-approach sets
    car_nx = np.empty((len(CarAction), n * n), dtype=np.int64)
    car_ny = np.empty_like(car_nx)
    approach = np.zeros((len(CarAction), n * n), dtype=bool)
    for a in CarAction:
        car_nx[a], car_ny[a] = move(cx, cy, CAR_MOVES[a])
        if a is not CarAction.STOP:
            approach[a] = (np.abs(car_nx[a] - gcx) + np.abs(car_ny[a] - gcy)) < car_dist
    n_moves = approach.sum(axis=0)
    stop_by_d = np.array([scenario.stop_profile(d) for d in range(grid.distance_cap + 1)])
    p_stop = np.where(n_moves > 0, stop_by_d[dist], 1.0)
    p_car = np.zeros((len(CarAction), n * n))
    p_car[CarAction.STOP] = p_stop
    for a in CAR_MOVEMENT_ACTIONS:
        p_car[a] = np.where(approach[a], (1.0 - p_stop) / np.maximum(n_moves, 1), 0.0)

    # pedestrian goal-seeking move per state (first approaching move, else wait)
    ped_gs = np.full(n * n, int(PedestrianAction.WAIT))
    for a in reversed(PED_MOVEMENT_ACTIONS):
        nx, ny = move(px, py, PED_MOVES[a])
        better = (np.abs(nx - gpx) + np.abs(ny - gpy)) < ped_dist
        ped_gs = np.where(better, int(a), ped_gs)
    gs_nx, gs_ny = px.copy(), py.copy()
    for a in PED_MOVEMENT_ACTIONS:
        nx, ny = move(px, py, PED_MOVES[a])
        sel = ped_gs == int(a)
        gs_nx, gs_ny = np.where(sel, nx, gs_nx), np.where(sel, ny, gs_ny)

    # pedestrian probabilities by distance
    survey = np.array([model.survey_probs(d) for d in range(grid.distance_cap + 1)])
    p_ped = survey[dist].T  # (8, n*n)
    c = model.predictability
    if c != 0.0:
        onehot = np.arange(len(PedestrianAction))[:, None] == ped_gs[None, :]
        p_ped = (1.0 - c) * p_ped + np.where(onehot, c, 0.0)

    def ind(sx, sy, nx, ny, goal):
        at_goal = (sx == goal[0]) & (sy == goal[1])
        to_goal = (nx == goal[0]) & (ny == goal[1])
        return np.where(
            at_goal & to_goal, 0.0, np.where(to_goal, params.goal_reward, params.step_cost)
        )

    nA1, nA2 = len(CarAction), len(PedestrianAction)
    reward = np.zeros((n * n, nA1, nA2))
    succ = np.zeros((n * n, nA1, nA2), dtype=np.int64)
    cont = np.zeros((n * n, nA1, nA2), dtype=bool)
    feasible = np.zeros((n * n, nA1, nA2), dtype=bool)
    base = scenario.interaction_reward_base
    for a1 in CarAction:
        nx1, ny1 = car_nx[a1], car_ny[a1]
        r1 = ind(cx, cy, nx1, ny1, car_goal)
        if a1 is not CarAction.STOP:
            r1 = r1 + np.where((nx1 == px) & (ny1 == py), params.collision_penalty, 0.0)
        for a2 in PedestrianAction:
            if a2 is PedestrianAction.GET_IN_CAR:
                nx2, ny2, in_car = nx1, ny1, True
            elif a2 is PedestrianAction.DONT_NOTICE_CAR:
                nx2, ny2, in_car = gs_nx, gs_ny, False
            elif a2 in PED_MOVES:
                (nx2, ny2), in_car = move(px, py, PED_MOVES[a2]), False
            else:
                nx2, ny2, in_car = px, py, False
            r2 = ind(px, py, nx2, ny2, ped_goal)
            if a2 is not PedestrianAction.GET_IN_CAR:
                moved = (nx2 != px) | (ny2 != py)
                r2 = r2 + np.where(moved & (nx2 == cx) & (ny2 == cy), params.collision_penalty, 0.0)
            t1 = p_car[a1] * 1.0 * dist
            t2 = p_ped[a2] * 1.0 * dist
            reward[:, a1, a2] = np.where(active, t1 * (r1 + base) + t2 * (r2 + base), 0.0)
            succ[:, a1, a2] = (ny1 * grid.width + nx1) * n + (ny2 * grid.width + nx2)
            done = (
                in_car
                | ((nx1 == gcx) & (ny1 == gcy))
                | ((nx2 == gpx) & (ny2 == gpy))
            )
            cont[:, a1, a2] = ~np.asarray(done, dtype=bool)
            feasible[:, a1, a2] = (p_car[a1] > 0.0) & (p_ped[a2] > 0.0)

    # outside the interaction range only the goal-seeking pair is allowed
    car_gs = np.where(approach.any(axis=0), np.argmax(approach, axis=0), int(CarAction.STOP))
    forced = np.zeros_like(feasible)
    forced[np.arange(n * n), car_gs, ped_gs] = True
    feasible = np.where(active[:, None, None], feasible, forced)

    terminal = ((cx == gcx) & (cy == gcy)) | ((px == gpx) & (py == gpy))
    extras = {"active": active, "car_gs": car_gs, "ped_gs": ped_gs, "p_ped": p_ped}
    return reward, succ, cont, feasible, terminal, extras


_PLAN_CACHE: dict = {}


def plan(
    grid: GridWorld,
    scenario: Scenario,
    params: ModelParams,
    model: PedestrianModel,
    car_goal,
    ped_goal,
    horizon: int,
) -> PolicyTable:
    """Backward induction of the joint lookahead for every depth up to ``horizon``.

    Ties go to the first joint action in (car enum, pedestrian enum) order.
    """
    key = (grid, scenario, params, model, tuple(car_goal), tuple(ped_goal), horizon)
    cached = _PLAN_CACHE.get(key)
    if cached is not None:
        return cached
    reward, succ, cont, feasible, terminal, extras = _transition_arrays(
        grid, scenario, params, model, car_goal, ped_goal
    )
    n_states = reward.shape[0]
    values = np.zeros((horizon + 1, n_states))
    actions = np.zeros((horizon + 1, n_states), dtype=np.int8)
    flat_feasible = feasible.reshape(n_states, -1)
    n_ped = len(PedestrianAction)
    for k in range(1, horizon + 1):
        future = np.where(cont, values[k - 1][succ], 0.0)
        q = (reward + params.phi * future).reshape(n_states, -1)
        q = np.where(flat_feasible, q, -np.inf)
        best = np.argmax(q, axis=1)
        values[k] = np.where(terminal, 0.0, q[np.arange(n_states), best])
        actions[k] = best // n_ped
    arrays = dict(extras, reward=reward, succ=succ, cont=cont)
    table = PolicyTable(actions, values, grid.n_cells, arrays)
    if len(_PLAN_CACHE) > 64:
        _PLAN_CACHE.clear()
    _PLAN_CACHE[key] = table
    return table


def joint_policy_step(
    grid: GridWorld,
    scenario: Scenario,
    params: ModelParams,
    model: PedestrianModel,
    joint: JointState,
    steps_left: int,
    u: float,
    table: Optional[PolicyTable] = None,
) -> tuple[CarAction, PedestrianAction, JointState, float, Optional[str]]:
    """Advance one iteration.

    Returns the car action, the pedestrian action, the next state, the
    realised interaction reward and the terminal label (``None`` if the
    episode continues).
    """
    if in_interaction(grid, scenario, joint):
        if table is None:
            table = plan(grid, scenario, params, model, joint.car_goal, joint.ped_goal, steps_left)
        a1 = table.lookup(grid, joint, steps_left)
        a2 = pedestrian_action(grid, scenario, model, joint, u)
    else:
        a1 = car_goal_step(grid, joint.car_pos, joint.car_goal)
        a2 = ped_goal_step(grid, joint.ped_pos, joint.ped_goal)
    r = step_reward(grid, scenario, params, model, joint, a1, a2)
    nxt, term = apply_actions(grid, joint, a1, a2)
    return a1, a2, nxt, r, term
