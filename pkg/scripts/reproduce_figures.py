"""Multi-seed table for the benchmark presets.

    python scripts/reproduce_figures.py --seeds 20

For each preset prints the median final consensus error, conservation drift
and the eavesdropper's estimation error, plus how many seeds met the
preset's checks.
"""

from __future__ import annotations

import argparse
import warnings

import numpy as np

from privcons.scenario import PRESETS, EpsilonBoundWarning, evaluate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--presets", nargs="*", default=sorted(PRESETS))
    args = ap.parse_args()
    warnings.simplefilter("ignore", EpsilonBoundWarning)

    print(f"{'preset':<16}{'protocol':<18}{'cons_err':>12}{'drift':>12}{'est_err':>12}{'est min..max':>24}{'checks':>10}")
    for name in args.presets:
        runs = [evaluate(PRESETS[name].with_overrides(seed=s)) for s in range(args.seeds)]
        cons = np.median([r.summary.final_consensus_error for r in runs])
        drift = np.median([r.summary.conservation_drift for r in runs])
        est = np.array([e for r in runs for e in r.summary.est_err.values()])
        ests = np.array([e for r in runs for e in r.summary.estimates.values()])
        passed = sum(r.passed for r in runs)
        rng_txt = f"{ests.min():.3g}..{ests.max():.3g}" if ests.size else "-"
        print(f"{name:<16}{runs[0].trace.protocol:<18}{cons:>12.3g}{drift:>12.3g}"
              f"{np.median(est) if est.size else float('nan'):>12.3g}{rng_txt:>24}{passed:>6}/{args.seeds}")


if __name__ == "__main__":
    main()
