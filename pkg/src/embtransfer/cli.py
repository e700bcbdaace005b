"""Command line entry point.

    embtransfer run <config>             multi-task transfer suite
    embtransfer explore <config>         exploration study with heatmaps
    embtransfer aggregate <dir>          summary.csv over seeds
    embtransfer heatmap <snapshot> <out> render a tracker snapshot as PGM

Exit codes: 0 ok, 1 configuration error, 2 runtime error.  Set
``EMBTRANSFER_OUTPUT_ROOT`` to redirect run output.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .harness import (
    ConfigError, ExperimentConfig, aggregate_runs, emit_snapshot_heatmap, parse_config,
    run_exploration_study, run_transfer_suite,
)
from .harness.heatmap import SNAPSHOT_FIELDS

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="embtransfer", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "run the transfer suite"), ("explore", "run the exploration study")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config")
        sp.add_argument("-q", "--quiet", action="store_true")
    sp = sub.add_parser("aggregate", help="aggregate metrics CSVs under a directory")
    sp.add_argument("directory")
    sp.add_argument("--window", type=int, default=20, help="moving-average window")
    sp = sub.add_parser("heatmap", help="render a tracker snapshot")
    sp.add_argument("snapshot")
    sp.add_argument("out")
    sp.add_argument("--field", choices=SNAPSHOT_FIELDS, default="N")
    sp.add_argument("--layout", help="layout kind or text map; default rebuilds from the snapshot")
    sp.add_argument("--size", type=int, default=None)
    return p


def _layout_grid(layout: str, size: Optional[int]):
    kwargs = {"layout": layout}
    if size is not None:
        kwargs["size"] = size
    return ExperimentConfig(**kwargs).grid()


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    say = (lambda msg: None) if getattr(args, "quiet", False) else (lambda msg: print(msg, flush=True))
    try:
        if args.command in ("run", "explore"):
            cfg = parse_config(args.config)
        elif args.command == "heatmap" and args.layout:
            grid = _layout_grid(args.layout, args.size)
        elif args.command == "aggregate" and args.window < 1:
            raise ConfigError("window must be >= 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "run":
            run_transfer_suite(cfg, progress=say)
            say(f"output in {cfg.output_path()}")
        elif args.command == "explore":
            run_exploration_study(cfg, progress=say)
            say(f"output in {cfg.output_path()}")
        elif args.command == "aggregate":
            say(f"wrote {aggregate_runs(args.directory, window=args.window)}")
        else:
            grid = grid if args.layout else None
            say(f"wrote {emit_snapshot_heatmap(args.snapshot, args.out, args.field, grid)}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # reported, not re-raised: the exit code carries the outcome
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
