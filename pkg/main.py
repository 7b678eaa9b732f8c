"""
Main entry point for Exciton Entangler.
Command-line front end for the driven two-exciton cavity simulations.
"""

import argparse
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

import config
from app.application import ExcitonEntanglerApp
from app.core.verifier import FAULTS


def build_parser() -> argparse.ArgumentParser:
    """Creates the argument parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Entanglement of two driven excitons coupled through a single-mode cavity.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument(
        "-o", "--output-dir", type=Path, default=None,
        help=f"output directory (default: ${config.OUTPUT_DIR_ENV} or {config.DEFAULT_OUTPUT_DIR})",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="evolve one config, write CSV, print the peak report")
    run.add_argument("config", type=Path)

    verify = commands.add_parser("verify", help="run the invariant suite")
    verify.add_argument("--quick", action="store_true", help="fast subset with reduced sizes")
    verify.add_argument("--inject-fault", choices=FAULTS, default=None, help="break a routine on purpose")
    verify.add_argument("--seed", type=int, default=0)

    benchmark = commands.add_parser("benchmark", help="Laguerre vs RK4 at matched accuracy")
    benchmark.add_argument("config", type=Path)

    sweep = commands.add_parser("sweep", help="run every config in a directory concurrently")
    sweep.add_argument("directory", type=Path, nargs="?", default=config.FIGURE_CONFIGS_DIR)
    sweep.add_argument("--workers", type=int, default=None)

    render = commands.add_parser("render", help="draw a trace CSV to PNG")
    render.add_argument("csv", type=Path)
    render.add_argument("--png", type=Path, default=None)
    render.add_argument(
        "--bridge", type=float, default=config.DEFAULT_PERIOD,
        help="longest sub-threshold dip kept inside the peak interval",
    )

    convergence = commands.add_parser("convergence", help="dt / n_fock convergence table for a config")
    convergence.add_argument("config", type=Path)

    return parser


def main(argv=None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    config.setup_logging("DEBUG" if args.verbose else config.LOG_LEVEL)

    app = ExcitonEntanglerApp(output_dir=args.output_dir)

    if args.command == "run":
        return app.run(args.config)
    if args.command == "verify":
        return app.verify(quick=args.quick, fault=args.inject_fault, seed=args.seed)
    if args.command == "benchmark":
        return app.benchmark(args.config)
    if args.command == "sweep":
        return app.sweep(args.directory, workers=args.workers)
    if args.command == "render":
        return app.render(args.csv, args.png, bridge=args.bridge)
    if args.command == "convergence":
        return app.convergence(args.config)
    return config.EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
