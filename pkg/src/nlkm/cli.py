"""
Command-line entry point.

    nlkm simulate --config run.cfg [--out DIR]
    nlkm analyze --config run.cfg [--json FILE]
    nlkm kernel-info --config run.cfg
    nlkm compare --local local.cfg --nonlocal nonlocal.cfg --out DIR

Exit codes: 0 success, 2 configuration error, 3 numerical invariant
violation, 4 I/O failure.
"""

import argparse
import json
import sys

from nlkm.commands import (
    cmd_analyze,
    cmd_compare,
    cmd_kernel_info,
    cmd_simulate,
    format_analysis,
    load_run_config,
)
from nlkm.config import ConfigError
from nlkm.stepper import InvariantViolation

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlkm", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one model and write snapshots")
    p.add_argument("--config", required=True, help="config file or a previous manifest.json")
    p.add_argument("--out", help="output directory (overrides [output] dir)")
    p.add_argument("--method", choices=("fft", "direct"), default="fft",
                   help="evaluation path for the nonlocal operator")

    p = sub.add_parser("analyze", help="equilibria and Turing conditions")
    p.add_argument("--config", required=True)
    p.add_argument("--json", dest="json_path", help="also write the report as JSON here")

    p = sub.add_parser("kernel-info", help="kernel mass and stencil statistics")
    p.add_argument("--config", required=True)

    p = sub.add_parser("compare", help="run local and nonlocal models from identical data")
    p.add_argument("--local", required=True)
    p.add_argument("--nonlocal", dest="nonlocal_config", required=True)
    p.add_argument("--out", required=True)
    return parser


def _dispatch(args) -> int:
    if args.command == "simulate":
        manifest = cmd_simulate(load_run_config(args.config), args.out, args.method)
        final = manifest["final"]
        print(f"t = {final['t']!r} after {manifest['derived']['n_steps']} steps "
              f"(dt = {manifest['derived']['dt']!r}); {len(manifest['snapshots'])} snapshots")
    elif args.command == "analyze":
        doc = cmd_analyze(load_run_config(args.config))
        print(format_analysis(doc))
        if args.json_path:
            with open(args.json_path, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=2)
    elif args.command == "kernel-info":
        info = cmd_kernel_info(load_run_config(args.config))
        for key, value in info.items():
            print(f"{key:<20}{value}")
    elif args.command == "compare":
        summary = cmd_compare(load_run_config(args.local), load_run_config(args.nonlocal_config), args.out)
        print(json.dumps(summary, indent=2))
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # Remaining ValueErrors are inconsistent inputs (bad dt, grid mismatch, ...).
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
