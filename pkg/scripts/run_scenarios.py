"""Run the four canonical scenarios over several master seeds and print the
final trust, variance ranking, mean steps and both S1/S4 gap measures.

    python scripts/run_scenarios.py [--runs 2000] [--seeds 0 1 2 3 4] [--jobs 1]
"""

import argparse
import time

from crosswalk.analysis import scenario_report
from crosswalk.domain import canonical_scenarios
from crosswalk.engine import run_batch


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=2000)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    t0 = time.perf_counter()
    print("seed  final S1..S4                       steps S1..S4              var rank  gap/S4  gap/S1")
    for seed in args.seeds:
        batches = [run_batch(s, runs=args.runs, master_seed=seed, jobs=args.jobs) for s in canonical_scenarios()]
        rep = scenario_report(batches)
        finals = " ".join(f"{b.final_trust:7.4f}" for b in batches)
        steps = " ".join(f"{b.mean_steps:5.2f}" for b in batches)
        print(f"{seed:4d}  {finals}  {steps}  {rep.variance_ranking}  {rep.gap_vs_s4:6.3f}  {rep.gap_vs_s1:6.3f}")
    print(f"elapsed {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
