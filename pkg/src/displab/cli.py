"""Command line entry point: displab <experiment-id> --config <path>."""
from __future__ import annotations

import argparse
import os
import sys

from .config import EXPERIMENTS, ConfigError, load_config
from .experiments import run
from .report import emit_report

EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE = 0, 1, 2


def build_parser():
    p = argparse.ArgumentParser(prog="displab", description="Run a numerical experiment and write its report.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="key = value file; omitted keys use experiment defaults")
    p.add_argument("--out", help="output directory (default: $DISPLAB_OUT/<experiment> or ./displab-out/<experiment>)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args.experiment, args.config)
        if args.seed is not None:
            cfg.seed = args.seed
    except (ConfigError, OSError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_USAGE
    out = args.out or cfg.out or os.path.join(os.environ.get("DISPLAB_OUT", "displab-out"), cfg.experiment)
    result = run(cfg, jobs=args.jobs)
    paths = emit_report(result, out)
    status = "PASS" if result.passed else "FAIL"
    line = f"{cfg.experiment}: {status} ({len(result.records)} samples"
    if result.fit:
        line += f", slope {result.fit['slope']:.4f}"
    print(line + f") -> {out}")
    for p in paths:
        print(f"  {p}")
    return EXIT_OK if result.passed else EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
