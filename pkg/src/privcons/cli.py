"""Command-line entry point: ``privcons {run,preset,indist,sweep}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .scenario import (
    FIG6_NOISE_SCALES,
    PRESETS,
    ParseError,
    Scenario,
    ValidationError,
    load_scenario,
    resolve_out_dir,
    run_indistinguishability_suite,
    run_scenario,
    sweep,
    sweep_csv,
    sweep_medians,
)

log = logging.getLogger("privcons")


def parse_seed_range(text: str) -> list[int]:
    """``"3..7"`` -> [3, 4, 5, 6, 7]; ``"1,4,9"`` -> [1, 4, 9]."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
        if hi_i < lo_i:
            raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
        return list(range(lo_i, hi_i + 1))
    return [int(v) for v in text.split(",") if v.strip()]


def parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="override the scenario's master seed")
    p.add_argument("--horizon", type=int, help="override the number of rounds")
    p.add_argument("--out-dir", help="output directory (env PRIVCONS_OUT_DIR also works)")
    p.add_argument("--check", action="store_true", help="exit 1 if any scenario check fails")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="privcons", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file, inline YAML, or preset name")
    p.add_argument("scenario")
    _common(p)

    p = sub.add_parser("preset", help="run a bundled preset")
    p.add_argument("name", nargs="?", choices=sorted(PRESETS))
    p.add_argument("--list", action="store_true", help="list presets and exit")
    p.add_argument("--dump", action="store_true", help="print the preset as YAML instead of running it")
    _common(p)

    p = sub.add_parser("indist", help="randomised alternate-world trials on a decomposed scenario")
    p.add_argument("scenario")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-8)
    _common(p)

    p = sub.add_parser("sweep", help="multi-seed, multi-noise-scale sweep")
    p.add_argument("scenario")
    p.add_argument("--seeds", type=parse_seed_range, default=list(range(50)))
    p.add_argument("--noise-scales", type=parse_floats, default=list(FIG6_NOISE_SCALES))
    p.add_argument("--workers", type=int, default=1)
    _common(p)
    return ap


def _load(name: str, args) -> Scenario:
    s = load_scenario(name)
    return s.with_overrides(seed=args.seed, horizon=args.horizon)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def cmd_run(s: Scenario, args) -> int:
    files, res = run_scenario(s, resolve_out_dir(s, args.out_dir))
    print(files["summary"].read_text(), end="")
    for label, path in files.items():
        log.info("wrote %s: %s", label, path)
    return 1 if args.check and not res.passed else 0


def cmd_indist(s: Scenario, args) -> int:
    report = run_indistinguishability_suite(s, args.trials, tol=args.tol)
    text = report.text()
    _write(resolve_out_dir(s, args.out_dir) / "indist.txt", text)
    print(text, end="")
    return 1 if args.check and report.failed else 0


def cmd_sweep(s: Scenario, args) -> int:
    rows = sweep(s, args.seeds, args.noise_scales, workers=args.workers)
    out = resolve_out_dir(s, args.out_dir)
    _write(out / "sweep.csv", sweep_csv(rows))
    med = sweep_medians(rows)
    for scale, vals in med.items():
        print(f"noise_scale = {scale!r}: " + ", ".join(f"median {k} = {v:.6g}" for k, v in vals.items()))
    scales = sorted(med)
    monotone = all(
        med[a][k] <= med[b][k] for a, b in zip(scales, scales[1:]) for k in med[a] if k.startswith(("avg_err", "est_err"))
    )
    print(f"medians nondecreasing in noise scale: {monotone}")
    print("\n# machine-readable\n" + json.dumps({"medians": {repr(k): v for k, v in med.items()},
                                                 "monotone": monotone}, sort_keys=True))
    return 1 if args.check and not monotone else 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        if args.command == "preset":
            if args.list or args.name is None:
                for name, s in sorted(PRESETS.items()):
                    print(f"{name}\t{s.protocol}\thorizon={s.horizon}")
                return 0
            s = _load(args.name, args)
            if args.dump:
                print(s.dump(), end="")
                return 0
            return cmd_run(s, args)
        s = _load(args.scenario, args)
        if args.command == "run":
            return cmd_run(s, args)
        if args.command == "indist":
            return cmd_indist(s, args)
        return cmd_sweep(s, args)
    except (ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
