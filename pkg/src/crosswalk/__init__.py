"""Gridworld simulation of car/pedestrian encounters with trust quantification."""

from crosswalk.analysis import confidence_bounds, fit_line, scenario_report
from crosswalk.domain import GridWorld, JointState, ModelParams, Scenario, canonical_scenarios
from crosswalk.engine import run_batch, run_episode
from crosswalk.survey import baseline_distribution, reweight

__all__ = [
    "GridWorld",
    "JointState",
    "ModelParams",
    "Scenario",
    "baseline_distribution",
    "canonical_scenarios",
    "confidence_bounds",
    "fit_line",
    "reweight",
    "run_batch",
    "run_episode",
    "scenario_report",
]
