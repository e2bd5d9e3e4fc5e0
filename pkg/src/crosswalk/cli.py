"""Command-line entry point.

    crosswalk --scenario all --runs 2000 --seed 42 --out results/

Writes into the output directory:

* ``episodes.csv``: scenario, run, seed, steps, terminal, final_trust
* ``mean_trace.csv``: scenario, iteration, mean_trust, variance
* ``report.csv``: one row per (scenario, level) with the fit and coefficient bands
* ``bands_<level>.csv``: fitted line and band per iteration, for plotting
* ``comparison.csv``: cross-scenario metrics (only when all four scenarios ran)

Numbers are written with 9 significant digits.

Overrides file (``--config``), INI syntax, every key optional::

    [model]
    gamma = 0.9
    phi = 0.95
    goal_reward = 1.0
    step_cost = -0.05
    collision_penalty = -2.0

    [survey]
    stop = 23
    wait = 22
    cross = 25
    dont_notice = 17
    get_in = 13

    [scenario.2]
    trust_score = 25          ; out of 30, or give trust_level directly
    distance_threshold = 3
    stop_profile = 1:0.9, 3:0.7
    stop_beyond = 0.1
    interaction_reward_base = -0.09
    ped_predictability = 0.0
    ics_enabled = true
    prior_knowledge = false
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from crosswalk.analysis import DEFAULT_LEVELS, confidence_bounds, fit_line, scenario_report
from crosswalk.domain import GridWorld, ModelParams, Scenario, StopProfile, canonical_scenarios
from crosswalk.engine import BatchResult, default_start, run_batch
from crosswalk.survey import PRE_SURVEY_COUNTS, Category, baseline_distribution, trust_level

OUT_ENV = "CROSSWALK_OUT"


@dataclasses.dataclass(frozen=True)
class RunConfig:
    scenarios: tuple[int, ...] = (1, 2, 3, 4)
    runs: int = 2000
    horizon: int = 10
    grid: GridWorld = GridWorld()
    seed: int = 0
    out: Path = Path("crosswalk_out")
    levels: tuple[float, ...] = DEFAULT_LEVELS
    config: Optional[Path] = None
    jobs: int = 1
    t_quantile: bool = False

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if any(not 0.0 < t <= 1.0 for t in self.levels):
            raise ValueError("levels must lie in (0, 1]")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


def fmt(x: float) -> str:
    return f"{x:.9g}"


# ---------------------------------------------------------------------------
# overrides file

_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}
_SCENARIO_KEYS = {
    "name", "ics_enabled", "prior_knowledge", "distance_threshold", "trust_level",
    "trust_score", "interaction_reward_base", "ped_predictability", "stop_profile",
    "stop_beyond",
}


def _parse_bool(v: str) -> bool:
    try:
        return _BOOL[v.strip().lower()]
    except KeyError:
        raise ValueError(f"not a boolean: {v!r}") from None


def _parse_profile(v: str) -> dict[int, float]:
    out = {}
    for item in v.split(","):
        d, _, p = item.partition(":")
        if not p:
            raise ValueError(f"stop_profile entries look like 'distance:prob', got {item!r}")
        out[int(d)] = float(p)
    return out


def load_overrides(path: Path, scenarios: list[Scenario], params: ModelParams):
    """Apply an INI overrides file; returns (scenarios, params, survey counts)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    with open(path) as fh:
        cp.read_file(fh)
    counts = dict(PRE_SURVEY_COUNTS)
    if cp.has_section("model"):
        fields = {f.name for f in dataclasses.fields(ModelParams)} - {"horizon"}
        kw = {}
        for k, v in cp["model"].items():
            if k not in fields:
                raise ValueError(f"[model]: unknown key {k!r}")
            kw[k] = float(v)
        params = dataclasses.replace(params, **kw)
    if cp.has_section("survey"):
        for k, v in cp["survey"].items():
            counts[Category(k)] = float(v)
    by_id = {s.scenario_id: s for s in scenarios}
    for section in cp.sections():
        if not section.startswith("scenario."):
            if section not in ("model", "survey"):
                raise ValueError(f"unknown section [{section}]")
            continue
        sid = int(section.split(".", 1)[1])
        if sid not in by_id:
            raise ValueError(f"[{section}]: no such scenario")
        sec = cp[section]
        unknown = set(sec) - _SCENARIO_KEYS
        if unknown:
            raise ValueError(f"[{section}]: unknown key(s) {sorted(unknown)}")
        sc = by_id[sid]
        kw = {}
        if "name" in sec:
            kw["name"] = sec["name"]
        for k in ("ics_enabled", "prior_knowledge"):
            if k in sec:
                kw[k] = _parse_bool(sec[k])
        if "distance_threshold" in sec:
            kw["distance_threshold"] = int(sec["distance_threshold"])
        if "trust_score" in sec:
            kw["trust_level"] = trust_level(float(sec["trust_score"]))
        if "trust_level" in sec:
            kw["trust_level"] = float(sec["trust_level"])
        for k in ("interaction_reward_base", "ped_predictability"):
            if k in sec:
                kw[k] = float(sec[k])
        if "stop_profile" in sec or "stop_beyond" in sec:
            steps = (
                _parse_profile(sec["stop_profile"]) if "stop_profile" in sec
                else dict(sc.stop_profile.steps)
            )
            beyond = float(sec.get("stop_beyond", sc.stop_profile.beyond))
            kw["stop_profile"] = StopProfile.from_mapping(steps, beyond)
        by_id[sid] = dataclasses.replace(sc, **kw)
    return [by_id[s.scenario_id] for s in scenarios], params, counts


# ---------------------------------------------------------------------------
# output


def _write(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def emit_csv(out: Path, batches: Sequence[BatchResult], levels: Sequence[float], quantile: bool) -> None:
    _write(
        out / "episodes.csv",
        ("scenario", "run", "seed", "steps", "terminal", "final_trust"),
        (
            (b.scenario_id, run, ep.seed, ep.steps_taken, ep.terminal, fmt(ep.trace.cumulative))
            for b in batches
            for run, ep in enumerate(b.episodes)
        ),
    )
    _write(
        out / "mean_trace.csv",
        ("scenario", "iteration", "mean_trust", "variance"),
        (
            (b.scenario_id, i + 1, fmt(m), fmt(v))
            for b in batches
            for i, (m, v) in enumerate(zip(b.mean_trace, b.trace_variance))
        ),
    )
    report_rows = []
    band_rows = {t: [] for t in levels}
    for b in batches:
        xs = range(1, len(b.mean_trace) + 1)
        fit = fit_line(list(xs), b.mean_trace)
        for t in levels:
            band = confidence_bounds(fit, t, quantile)
            report_rows.append((
                b.scenario_id, fmt(t), fmt(band.multiplier), fmt(fit.intercept), fmt(fit.slope),
                fmt(fit.residual_mse), fmt(band.lower[0]), fmt(band.upper[0]),
                fmt(band.lower[1]), fmt(band.upper[1]),
            ))
            for x, m in zip(xs, b.mean_trace):
                band_rows[t].append((
                    b.scenario_id, x, fmt(m), fmt(fit.intercept + fit.slope * x),
                    fmt(band.lower[0] + band.lower[1] * x), fmt(band.upper[0] + band.upper[1] * x),
                ))
    _write(
        out / "report.csv",
        ("scenario", "level", "multiplier", "intercept", "slope", "residual_mse",
         "intercept_lower", "intercept_upper", "slope_lower", "slope_upper"),
        report_rows,
    )
    for t, rows in band_rows.items():
        _write(
            out / f"bands_{t:g}.csv",
            ("scenario", "iteration", "mean_trust", "fitted", "lower", "upper"),
            rows,
        )
    if {b.scenario_id for b in batches} >= {1, 2, 3, 4}:
        rep = scenario_report(batches, levels, quantile)
        _write(
            out / "comparison.csv",
            ("metric", "value"),
            [
                ("gap_vs_s4", fmt(rep.gap_vs_s4)),
                ("gap_vs_s1", fmt(rep.gap_vs_s1)),
                ("variance_ranking", " ".join(map(str, rep.variance_ranking))),
            ],
        )


def summary_table(batches: Sequence[BatchResult]) -> str:
    order = sorted(batches, key=lambda b: -b.variance_score)
    rank = {b.scenario_id: i + 1 for i, b in enumerate(order)}
    lines = [f"{'scenario':>8}  {'final_trust':>12}  {'mean_steps':>10}  {'var_rank':>8}"]
    for b in batches:
        lines.append(
            f"{b.scenario_id:>8}  {b.final_trust:>12.6f}  {b.mean_steps:>10.3f}  {rank[b.scenario_id]:>8}"
        )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# argument parsing


def _positive_int(v: str) -> int:
    n = int(v)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _scenarios(v: str) -> tuple[int, ...]:
    if v == "all":
        return (1, 2, 3, 4)
    if v in ("1", "2", "3", "4"):
        return (int(v),)
    raise argparse.ArgumentTypeError("choose 1, 2, 3, 4 or all")


def _grid(v: str) -> GridWorld:
    try:
        w, h = (int(p) for p in v.lower().split("x"))
        return GridWorld(w, h)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected WxH with both >= 2, got {v!r}") from e


def _levels(v: str) -> tuple[float, ...]:
    try:
        out = tuple(float(p) for p in v.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level list {v!r}") from None
    if not out or any(not 0.0 < t <= 1.0 for t in out):
        raise argparse.ArgumentTypeError("levels must lie in (0, 1]")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crosswalk", description="Car/pedestrian trust simulation.")
    p.add_argument("--scenario", type=_scenarios, default=(1, 2, 3, 4), metavar="{1,2,3,4,all}")
    p.add_argument("--runs", type=_positive_int, default=2000)
    p.add_argument("--horizon", type=_positive_int, default=10)
    p.add_argument("--grid", type=_grid, default=GridWorld(), metavar="WxH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None, help=f"output dir (default ${OUT_ENV} or ./crosswalk_out)")
    p.add_argument("--levels", type=_levels, default=DEFAULT_LEVELS, metavar="a,b,c")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--t-quantile", action="store_true", help="use Student-t quantiles as band multipliers")
    return p


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    out = ns.out or Path(os.environ.get(OUT_ENV) or "crosswalk_out")
    if ns.t_quantile and any(t >= 1.0 for t in ns.levels):
        parser.error("--t-quantile needs every level below 1")
    return RunConfig(
        scenarios=ns.scenario, runs=ns.runs, horizon=ns.horizon, grid=ns.grid, seed=ns.seed,
        out=out, levels=ns.levels, config=ns.config, jobs=ns.jobs, t_quantile=ns.t_quantile,
    )


def run(cfg: RunConfig) -> list[BatchResult]:
    scenarios = canonical_scenarios()
    params = ModelParams(horizon=cfg.horizon)
    counts = PRE_SURVEY_COUNTS
    if cfg.config is not None:
        scenarios, params, counts = load_overrides(cfg.config, scenarios, params)
    baseline = baseline_distribution(counts)
    return [
        run_batch(
            sc, cfg.grid, default_start, runs=cfg.runs, master_seed=cfg.seed,
            params=params, baseline=baseline, jobs=cfg.jobs,
        )
        for sc in scenarios
        if sc.scenario_id in cfg.scenarios
    ]


def main(argv: Optional[Sequence[str]] = None) -> int:
    cfg = parse_config(argv)  # exits 2 on bad flags
    try:
        cfg.out.mkdir(parents=True, exist_ok=True)
        probe = cfg.out / ".write_test"
        probe.write_text("")
        probe.unlink()
    except OSError as e:
        print(f"crosswalk: cannot write to {cfg.out}: {e}", file=sys.stderr)
        return 1
    try:
        batches = run(cfg)
    except (ValueError, OSError, configparser.Error) as e:
        print(f"crosswalk: {e}", file=sys.stderr)
        return 1
    try:
        emit_csv(cfg.out, batches, cfg.levels, cfg.t_quantile)
    except OSError as e:
        print(f"crosswalk: writing results failed: {e}", file=sys.stderr)
        return 1
    print(summary_table(batches))
    return 0


if __name__ == "__main__":
    sys.exit(main())
