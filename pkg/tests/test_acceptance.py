"""Acceptance criteria, one test each.  Every test records a PASS/FAIL line
that is echoed in the terminal summary."""

import hashlib
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import conftest
from crosswalk.analysis import DEFAULT_LEVELS, confidence_bounds, fit_line, scenario_report
from crosswalk.behavior import PedestrianModel, apply_actions
from crosswalk.cli import main
from crosswalk.domain import (
    CAR_MOVES,
    PED_MOVES,
    CarAction,
    GridWorld,
    JointState,
    ModelParams,
    PedestrianAction,
    canonical_scenarios,
)
from crosswalk.engine import default_start, jittered_start, run_batch, run_episode
from crosswalk.survey import PRE_SURVEY_COUNTS, Category, baseline_distribution, reweight
from crosswalk.trust import interaction_reward, theta
from oracles import brute_force_first_action, normal_equations

SEEDS = (11, 12, 13, 14, 15)  # disjoint from the calibration seeds
MANY = settings(max_examples=10_000, deadline=None, database=None)


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def sweep():
    t0 = time.perf_counter()
    out = {
        seed: [run_batch(sc, runs=2000, master_seed=seed) for sc in canonical_scenarios()]
        for seed in SEEDS
    }
    return out, time.perf_counter() - t0


def test_criterion_1_survey_pipeline():
    base = baseline_distribution(PRE_SURVEY_COUNTS)
    exact = np.allclose(base.as_tuple(), (0.23, 0.22, 0.25, 0.17, 0.13), atol=1e-12, rtol=0)
    rw = reweight(base, 27 / 30)
    got = [
        round(100 * rw[c])
        for c in (Category.GET_IN, Category.DONT_NOTICE, Category.WAIT, Category.STOP, Category.CROSS)
    ]
    close = all(abs(g - p) <= 1 for g, p in zip(got, (24, 32, 14, 14, 14)))
    record(1, exact and close, f"baseline={base.as_tuple()} reweighted%={got}")


def test_criterion_2_trust_negative(sweep):
    batches, elapsed = sweep
    worst = max(float(b.mean_trace.max()) for bs in batches.values() for b in bs)
    ok = worst <= 0.0 and elapsed < 10.0
    record(2, ok, f"max mean trust over {len(SEEDS)} seeds = {worst:.3g}; sweep {elapsed:.1f}s")


def test_criterion_3_trust_ordering(sweep):
    batches, _ = sweep
    finals = {s: [round(b.final_trust, 4) for b in bs] for s, bs in batches.items()}
    ok = all(f[0] > f[1] > f[2] > f[3] for f in finals.values())
    record(3, ok, f"final trust S1..S4 per seed {finals}")


def test_criterion_4_calibration_gap(sweep):
    batches, _ = sweep
    reps = [scenario_report(bs) for bs in batches.values()]
    gaps = [r.gap_vs_s4 for r in reps]
    alt = [r.gap_vs_s1 for r in reps]
    ok = all(1.1 <= g <= 1.8 for g in gaps)
    record(
        4, ok,
        f"|T1-T4|/|T4| = {[round(g, 3) for g in gaps]} (|T1-T4|/|T1| = {[round(a, 3) for a in alt]})",
    )


def test_criterion_5_variance_ordering(sweep):
    batches, _ = sweep
    ranks = [scenario_report(bs).variance_ranking for bs in batches.values()]
    ok = all(r[0] == 2 and r[-1] == 3 for r in ranks)
    record(5, ok, f"variance ranking (largest first) per seed {ranks}")


def test_criterion_6_steps_ordering(sweep):
    batches, _ = sweep
    steps = [[b.mean_steps for b in bs] for bs in batches.values()]
    ok = all(max(s[0], s[2]) <= min(s[1], s[3]) for s in steps)
    record(6, ok, f"mean steps S1..S4 per seed {[[round(x, 2) for x in s] for s in steps]}")


def test_criterion_7_oracle_equivalence():
    g = GridWorld(3, 3)
    params = ModelParams(horizon=2)
    base = baseline_distribution(PRE_SURVEY_COUNTS)
    scenarios = canonical_scenarios()
    mismatches = checked = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        i, j = rng.choice(g.n_cells, 2, replace=False)
        car, ped = g.cell(int(i)), g.cell(int(j))
        start = JointState(car, ped, car_goal=ped, ped_goal=car)
        sc = scenarios[seed % 4]
        model = PedestrianModel.for_scenario(sc, base)
        ep = run_episode(sc, g, start, seed, params, base)
        joint = start
        for t, (a1, a2) in enumerate(zip(ep.car_actions, ep.ped_actions)):
            (b1, _), _ = brute_force_first_action(g, sc, params, model, joint, params.horizon - t)
            checked += 1
            mismatches += b1 is not a1
            joint, _ = apply_actions(g, joint, a1, a2)
    record(7, mismatches == 0, f"{checked} car decisions over 100 seeds, {mismatches} mismatches")


def test_criterion_8_regression_oracle():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(5, 51))
        xs = np.sort(rng.uniform(0, 10, n))
        ys = 0.3 - 0.07 * xs + rng.normal(0, 0.2, n)
        fit = fit_line(xs, ys)
        ref = normal_equations(xs.tolist(), ys.tolist())
        got = (fit.intercept, fit.slope, fit.residual_mse, *fit.coefficient_variances)
        worst = max(worst, max(abs(a - b) / abs(b) for a, b in zip(got, ref)))
    fit = fit_line(range(1, 11), -np.linspace(0, 1, 10) + rng.normal(0, 0.05, 10))
    widths = [confidence_bounds(fit, t).widths for t in DEFAULT_LEVELS]
    monotone = all(b[0] > a[0] and b[1] > a[1] for a, b in zip(widths, widths[1:]))
    zero = confidence_bounds(fit, 0.0)
    collapsed = zero.lower == zero.upper == fit.coefficients
    ok = worst <= 1e-9 and monotone and collapsed
    record(8, ok, f"max rel err {worst:.2e}; widths monotone={monotone}; t=0 collapses={collapsed}")


def _hash_dir(d):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(d.glob("*.csv"))}


def test_criterion_9_determinism(tmp_path):
    args = ["--scenario", "all", "--runs", "200", "--seed", "42"]
    runs = {
        "a": args, "b": args, "jobs4": args + ["--jobs", "4"],
    }
    hashes = {}
    for name, argv in runs.items():
        assert main(argv + ["--out", str(tmp_path / name)]) == 0
        hashes[name] = _hash_dir(tmp_path / name)
    ok = hashes["a"] == hashes["b"] == hashes["jobs4"] and len(hashes["a"]) >= 3
    record(9, ok, f"{len(hashes['a'])} CSV files identical across 3 invocations (one with --jobs 4)")


# criterion 10: four properties at 10^4 cases each

_CASES = {"norm": 0, "bounds": 0, "horizon": 0, "theta": 0}

counts = st.fixed_dictionaries({c: st.floats(0, 1e3) for c in Category}).filter(
    lambda d: sum(d.values()) > 1e-6
)


@MANY
@given(counts, st.floats(0, 1), st.floats(0, 1), st.integers(0, 6))
def _prop_normalization(cnt, trust, c, d):
    _CASES["norm"] += 1
    base = baseline_distribution(cnt)
    rw = reweight(base, trust)
    assert abs(sum(base.as_tuple()) - 1) <= 1e-9
    assert abs(sum(rw.as_tuple()) - 1) <= 1e-9
    model = PedestrianModel.from_distribution(rw, c)
    assert abs(sum(model.effective(d, PedestrianAction.FORWARD)) - 1) <= 1e-9


@MANY
@given(
    st.integers(2, 12), st.integers(2, 12), st.integers(0, 10**6), st.integers(0, 10**6),
    st.sampled_from(list(CarAction)), st.sampled_from(list(PedestrianAction)),
)
def _prop_bounds(w, h, ci, pi, a1, a2):
    _CASES["bounds"] += 1
    g = GridWorld(w, h)
    car, ped = g.cell(ci % g.n_cells), g.cell(pi % g.n_cells)
    assert g.contains(g.step(car, CAR_MOVES[a1]))
    assert g.contains(g.step(ped, PED_MOVES.get(a2, (0, 0))))
    nxt, _ = apply_actions(g, JointState(car, ped, g.cell(0), g.cell(g.n_cells - 1)), a1, a2)
    nxt.validate(g)


_GRID = GridWorld()
_STARTS = [default_start(_GRID)] + [jittered_start(_GRID, np.random.default_rng(i)) for i in range(5)]


@MANY
@given(st.integers(0, 2**32 - 1), st.integers(0, 3), st.integers(0, len(_STARTS) - 1))
def _prop_horizon(seed, k, si):
    _CASES["horizon"] += 1
    ep = run_episode(canonical_scenarios()[k], _GRID, _STARTS[si], seed)
    assert ep.steps_taken <= 10 and len(ep.trace) <= 10


@MANY
@given(
    st.floats(0, 1), st.floats(0, 1), st.floats(0, 1),
    st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10), st.integers(0, 6),
)
def _prop_theta(p1, p2, obs, r1, r2, base, thr):
    _CASES["theta"] += 1
    assert theta(p1, obs, 0) == 0
    assert interaction_reward(0, thr, p1, p2, r1, r2, base, obs) == 0


def test_criterion_10_invariants():
    failures = []
    for name, prop in (
        ("norm", _prop_normalization), ("bounds", _prop_bounds),
        ("horizon", _prop_horizon), ("theta", _prop_theta),
    ):
        try:
            prop()
        except Exception as e:  # noqa: BLE001 - reported below
            failures.append(f"{name}: {type(e).__name__}")
    enough = all(n >= 10_000 for n in _CASES.values())
    record(10, not failures and enough, f"cases={_CASES} failures={failures}")
