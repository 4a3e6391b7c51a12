"""Command-line entry point.

    gaussian-hulls simulate --config square.json --out runs/square
    gaussian-hulls goodman --seed 1,2,3 --n 100000
    gaussian-hulls tailbound --out runs/tail
    gaussian-hulls partition-check --config p.json
    gaussian-hulls hull2d --config square.json --out runs/hulls
    gaussian-hulls simulate --emit-default-config > square.json

Exit codes: 0 success, 1 configuration error, 2 runtime or I/O error,
3 invariant violation detected during a run.
"""

import argparse
import logging
import sys

from .config import ConfigError, config_from_dict, default_config, dump_config, parse_config
from .runner import InvariantViolation, run

SUBCOMMANDS = {
    "simulate": "counterexample",
    "goodman": "goodman",
    "tailbound": "tailbound",
    "partition-check": "partition-check",
    "hull2d": "hull2d-demo",
}

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_INVARIANT = 0, 1, 2, 3


def _seed_list(text):
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None
    if not seeds or any(s < 0 or s >= 2**64 for s in seeds):
        raise argparse.ArgumentTypeError("seeds must be unsigned 64-bit integers")
    return seeds


def build_parser():
    parser = argparse.ArgumentParser(prog="gaussian-hulls", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--seed", type=_seed_list, help="comma-separated seeds (overrides config)")
        p.add_argument("--n", type=int, help="largest sample size; later checkpoints are dropped")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--threads", type=int, help="worker threads across seeds")
        p.add_argument("--lenient", action="store_true", help="warn on unknown config keys")
        p.add_argument("--emit-default-config", action="store_true",
                       help="print the default config for this subcommand and exit")
    return parser


def _truncate(checkpoints, n):
    kept = [c for c in checkpoints if c <= n]
    if n >= 2 and (not kept or kept[-1] < n):
        kept.append(n)
    return kept


def load_config(args):
    mode = SUBCOMMANDS[args.command]
    if args.config:
        cfg = parse_config(args.config, strict=not args.lenient)
        if cfg.mode != mode:
            cfg.mode = mode
    else:
        cfg = default_config(mode)
    if args.seed:
        cfg.seeds = list(args.seed)
    if args.n is not None:
        if args.n < 2:
            raise ConfigError("--n", "must be >= 2")
        cfg.checkpoints = _truncate(cfg.checkpoints, args.n)
        cfg.tailbound.n = _truncate(sorted(cfg.tailbound.n), args.n)
    if args.out:
        cfg.output_dir = args.out
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads", "must be >= 1")
        cfg.threads = args.threads
    # re-validate the merged config
    return config_from_dict(cfg.to_dict())


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.emit_default_config:
        sys.stdout.write(dump_config(default_config(SUBCOMMANDS[args.command])))
        return EXIT_OK
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run(cfg)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except KeyboardInterrupt:
        print("interrupted; partial report written", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"{len(report.rows)} rows written to {cfg.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
