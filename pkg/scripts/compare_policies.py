"""Planned car versus a car that only samples its stop profile.

Shows how much of each scenario's trust trace comes from the lookahead
planner rather than the reactive stopping rule.

    python scripts/compare_policies.py [--runs 2000] [--seed 0]
"""

import argparse

from crosswalk.domain import canonical_scenarios
from crosswalk.engine import run_batch


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'scenario':<34}{'policy':<10}{'final':>9}{'steps':>8}{'var':>9}")
    for sc in canonical_scenarios():
        for policy in ("plan", "reactive"):
            b = run_batch(sc, runs=args.runs, master_seed=args.seed, car_policy=policy)
            print(f"{sc.name:<34}{policy:<10}{b.final_trust:9.4f}{b.mean_steps:8.2f}{b.variance_score:9.4f}")


if __name__ == "__main__":
    main()
