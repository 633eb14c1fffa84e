"""Command line interface.

    hubbard-ring run CONFIG [--out DIR] [--no-plots] [--mode exact|krylov] [--workers N]
    hubbard-ring list-scenarios
    hubbard-ring selftest

Exit codes: 0 success, 1 selftest failure, 2 configuration error,
3 numerical failure, 4 output error.
"""

import argparse
import logging
import sys

from .config import ConfigError, load_config
from .evolution import EvolutionError
from .scenarios import ScenarioError

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_OUTPUT = 4

SCENARIO_HELP = {
    "barrier-comparison": "mirror-symmetric superposition state under alpha = 0.5 and alpha = 1 barriers",
    "direction-flip": "doublon next to the alpha*h (A) or h (B) barrier, unpaired up fermion across the ring",
    "alpha-scan": "configs A and B over alpha in [0.1, 1.2], step 0.02, with counter-propagation summary",
}


def _run(args):
    overrides = {"out_dir": args.out, "mode": args.mode, "t_max": args.t_max, "dt": args.dt}
    if args.no_plots:
        overrides["plots"] = False
    if args.workers is not None:
        overrides["workers"] = args.workers
    try:
        cfg = load_config(args.config, {k: v for k, v in overrides.items() if v is not None})
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    from .runner import execute

    try:
        _, written = execute(cfg)
    except (ScenarioError, ValueError) as exc:
        # BasisError and friends: the config was valid YAML but not a valid system
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EvolutionError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    for p in written:
        print(p)
    return EXIT_OK


def _list(_args):
    for name, text in SCENARIO_HELP.items():
        print(f"{name:20s} {text}")
    return EXIT_OK


def _selftest(_args):
    from .checks import run_selftest

    results = run_selftest()
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_SELFTEST


def build_parser():
    parser = argparse.ArgumentParser(prog="hubbard-ring", description="Spin-resolved transport on a Hubbard ring.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario from a YAML config file")
    run.add_argument("config", help="YAML config file (an empty file runs barrier-comparison with defaults)")
    run.add_argument("--out", help="output directory (default: config, $HUBBARD_RING_OUTPUT_DIR, ./hubbard_ring_out)")
    run.add_argument("--no-plots", action="store_true", help="write data files only")
    run.add_argument("--mode", choices=("exact", "krylov"), help="propagator override")
    run.add_argument("--workers", type=int, help="threads for alpha-scan points")
    run.add_argument("--t-max", type=float, dest="t_max", help="override grid.t_max")
    run.add_argument("--dt", type=float, help="override grid.dt")
    run.set_defaults(func=_run)

    sub.add_parser("list-scenarios", help="list available scenarios").set_defaults(func=_list)
    sub.add_parser("selftest", help="run the invariant suite on the default configuration").set_defaults(func=_selftest)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
