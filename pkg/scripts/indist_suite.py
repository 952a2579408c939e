"""Alternate-world trials on random connected graphs.

    python scripts/indist_suite.py --trials 200 --min-nodes 3 --max-nodes 6

Each trial draws a graph, a decomposed run, a target, an accomplice
neighbour and an altered initial value, then reports how many trials pass
every check (observer views, states from round 1, both eavesdropper
variants, accomplice divergence).
"""

from __future__ import annotations

import argparse
from collections import Counter

import numpy as np

from privcons.consensus import decompose, random_alpha_beta_schedule, simulate_decomposed
from privcons.graph import epsilon_bound, max_degree, random_connected_topology, random_weight_schedule
from privcons.indistinguishability import run_trial


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--min-nodes", type=int, default=3)
    ap.add_argument("--max-nodes", type=int, default=6)
    ap.add_argument("--horizon", type=int, default=40)
    ap.add_argument("--tol", type=float, default=1e-8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    status, checks = Counter(), Counter()
    for _ in range(args.trials):
        n = int(rng.integers(args.min_nodes, args.max_nodes + 1))
        t = random_connected_topology(n, rng)
        x0 = rng.uniform(-10, 10, n)
        ws = random_weight_schedule(t, args.horizon, rng)
        ab = random_alpha_beta_schedule(n, args.horizon, rng)
        eps = epsilon_bound(max_degree(t), True)
        tr = simulate_decomposed(t, x0, decompose(x0, rng), ws, ab, eps, args.horizon)
        j = int(rng.integers(n))
        m = int(rng.choice(t.neighbors[j]))
        others = [i for i in range(n) if i not in (j, m)]
        obs = int(rng.choice(others)) if others else None
        res = run_trial(tr, j, m, float(x0[j] + rng.uniform(-50, 50)), obs, args.tol)
        status[res.status] += 1
        checks.update(k for k, v in res.checks.items() if v)
        if res.status == "fail":
            print(f"FAIL n={n} j={j} m={m}: {res.detail}")
    print(dict(status))
    for k, v in sorted(checks.items()):
        print(f"  {k}: {v}")


if __name__ == "__main__":
    main()
