"""Fit each scenario's interaction reward base to a target final mean trust.

S2's base is held fixed inside the regime where its car yields often (its
final trust is not monotone in the base because the planned policy switches).
The other targets are set relative to S2's final trust so the Table 1 ordering
(S1 > S2 > S3 > S4) holds, with S4 at 2.42x the S1 value.  Prints the fitted
bases and a five-seed check of the orderings the acceptance suite looks at.

    python scripts/calibrate.py [--runs 2000] [--seed 0]
"""

import argparse
import dataclasses

import numpy as np

from crosswalk.domain import canonical_scenarios
from crosswalk.engine import run_batch

S2_BASE = -0.09


def final_trust(scenario, base, runs, seed):
    s = dataclasses.replace(scenario, interaction_reward_base=base)
    return run_batch(s, runs=runs, master_seed=seed).final_trust


def solve(scenario, target, runs, seed, lo=-8.0, hi=0.0, tol=1e-4, max_iter=40):
    """Bisection on the base; final trust decreases as the base gets more negative."""
    f_lo = final_trust(scenario, lo, runs, seed) - target
    f_hi = final_trust(scenario, hi, runs, seed) - target
    if f_lo > 0 or f_hi < 0:
        raise RuntimeError(f"S{scenario.scenario_id}: target {target} not bracketed ({f_lo}, {f_hi})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f = final_trust(scenario, mid, runs, seed) - target
        if abs(f) < tol:
            return mid
        if f > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--check-seeds", type=int, default=5)
    args = ap.parse_args()

    scenarios = canonical_scenarios()
    m2 = final_trust(scenarios[1], S2_BASE, args.runs, args.seed)
    targets = {1: 0.9 * m2, 3: 1.1 * m2, 4: 0.9 * m2 * 2.42}
    bases = {2: S2_BASE}
    for s in scenarios:
        if s.scenario_id in targets:
            bases[s.scenario_id] = round(solve(s, targets[s.scenario_id], args.runs, args.seed), 4)
    for sid in sorted(bases):
        print(f"S{sid}: base = {bases[sid]}")

    for seed in range(args.check_seeds):
        batches = [
            run_batch(dataclasses.replace(s, interaction_reward_base=bases[s.scenario_id]),
                      runs=args.runs, master_seed=seed)
            for s in canonical_scenarios()
        ]
        finals = [b.final_trust for b in batches]
        var = [b.variance_score for b in batches]
        steps = [b.mean_steps for b in batches]
        print(
            f"seed {seed}: final {np.round(finals, 4)} var {np.round(var, 4)} "
            f"steps {np.round(steps, 2)} gap/S1 {abs(finals[0] - finals[3]) / abs(finals[0]):.3f}"
        )


if __name__ == "__main__":
    main()
