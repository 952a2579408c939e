"""Privacy/accuracy trade-off of the decaying-Laplace baseline.

    python scripts/sweep_laplace.py --seeds 50 --scales 0.1 1 10 --workers 4 --csv sweep.csv

Prints median Avg Err and Est Err per noise scale and whether both are
nondecreasing in the scale.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from privcons.scenario import FIG6_NOISE_SCALES, PRESETS, sweep, sweep_csv, sweep_medians


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--scales", type=float, nargs="+", default=list(FIG6_NOISE_SCALES))
    ap.add_argument("--horizon", type=int)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--csv", type=Path, help="also write every row here")
    args = ap.parse_args()

    s = PRESETS["paper-fig6"].with_overrides(horizon=args.horizon)
    rows = sweep(s, range(args.seeds), args.scales, workers=args.workers)
    med = sweep_medians(rows)
    scales = sorted(med)
    keys = [k for k in med[scales[0]] if k != "final_consensus_error"]
    print("noise_scale  " + "  ".join(f"{k:>24}" for k in keys))
    for sc in scales:
        print(f"{sc:<11g}  " + "  ".join(f"{med[sc][k]:>24.4g}" for k in keys))
    mono = all(med[a][k] <= med[b][k] for a, b in zip(scales, scales[1:]) for k in keys)
    print(f"nondecreasing: {mono}")
    if args.csv:
        args.csv.write_text(sweep_csv(rows))


if __name__ == "__main__":
    main()
