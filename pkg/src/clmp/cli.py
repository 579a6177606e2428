"""Command-line entry point: `clmp run ...` executes a sweep and writes a CSV."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import PRESET_NAMES, ConfigError, build_preset, parse_config_file
from .harness import run_experiment, write_result_csv


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clmp",
        description="Monte-Carlo activity-detection experiments with CSV output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run an experiment sweep")
    src = run_p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a flat key = value config file")
    src.add_argument("--preset", choices=PRESET_NAMES, help="bundled experiment preset")
    run_p.add_argument("--out", help="output CSV path (default: <preset>.csv or results.csv)")
    run_p.add_argument("--seed", type=int, help="override the master seed")
    run_p.add_argument("--detectors", help="comma-separated subset of the configured detectors")
    run_p.add_argument("--trials", type=int, help="override the trial count Q")
    run_p.add_argument("--workers", type=int, default=1, help="concurrent trial workers")
    return parser


def _apply_overrides(cfgs, args):
    out = []
    for cfg in cfgs:
        if args.seed is not None:
            cfg = replace(cfg, master_seed=args.seed)
        if args.trials is not None:
            cfg = replace(cfg, trials=args.trials)
        if args.detectors is not None:
            requested = tuple(d.strip() for d in args.detectors.split(",") if d.strip())
            if not requested:
                raise ConfigError("--detectors must name at least one detector")
            unknown = [d for d in requested if d not in ("clmp", "cwo", "somp", "msbl")]
            if unknown:
                raise ConfigError(f"unknown detectors requested: {', '.join(unknown)}")
            kept = tuple(d for d in cfg.detectors if d in requested)
            if not kept:
                continue  # this curve family has none of the requested detectors
            cfg = replace(cfg, detectors=kept)
        cfg.validate()
        out.append(cfg)
    if not out:
        raise ConfigError("no experiments left after applying --detectors")
    return out


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config is not None:
            cfgs = [parse_config_file(args.config)]
            default_out = "results.csv"
        else:
            cfgs = build_preset(args.preset)
            default_out = f"{args.preset}.csv"
        cfgs = _apply_overrides(cfgs, args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_path = args.out if args.out is not None else default_out
    try:
        rows = []
        for i, cfg in enumerate(cfgs):
            if len(cfgs) > 1:
                print(f"[{i + 1}/{len(cfgs)}] series {cfg.label_suffix or '(default)'}")
            rows.extend(run_experiment(cfg, workers=args.workers, progress=print))
        rows.sort(key=lambda r: (r.sweep_value, r.detector))
        write_result_csv(rows, out_path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"run failed: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {len(rows)} rows to {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
