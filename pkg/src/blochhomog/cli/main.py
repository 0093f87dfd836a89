#!/usr/bin/env python
"""
CLI for the homogenization verification suites.

Usage:
    bloch-homog tensors --config configs/laminate_1d.json
    python -m blochhomog.cli.main all --config configs/smooth_2d.json --out runs/smooth2d
"""

import argparse
import sys
from typing import List, Optional

from blochhomog.cli.pipeline import run
from blochhomog.cli.run_config import load_run_config
from blochhomog.core.constants import EXIT_CONFIG_ERROR, EXIT_SOLVER_ERROR, MODES
from blochhomog.exceptions import BlochHomogError
from blochhomog.logging_config import get_logger, setup_logging


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bloch-homog",
        description="Compute A*, B* and B# and verify them against their Bloch-wave characterizations",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Modes:
    tensors          A*, B*, the three B# assemblies and two-scale B#
    bounds           bound chain b1*I <= ... <= b2*(a2/a1)*I
    variational      Lagrangian value and trial-energy identities
    bloch-verify     half-Hessians of lambda1, mu1, nu1 at 0 and dispersion samples
    transform-check  Parseval, inversion and first-band limits of the Bloch transform
    converge-1d      1D flux convergence with B# and the B* control
    all              every mode in dependency order

Examples:
    bloch-homog bounds --config configs/laminate_1d.json
    bloch-homog bloch-verify --config configs/smooth_2d.json --resolution 32 --tol 1e-11
    bloch-homog all --config configs/laminate_1d.json --out runs/laminate --log-level DEBUG

Exit codes: 0 all checks pass, 2 a check failed, 3 invalid configuration,
4 solver failure, 5 report could not be written.
        """,
    )
    parser.add_argument("mode", choices=MODES, help="Verification suite to run")
    parser.add_argument(
        "--config",
        type=str,
        required=True,
        help="Path to the JSON run configuration",
    )
    parser.add_argument(
        "--out",
        type=str,
        default=None,
        help="Output directory (default: from config file, then BLOCH_HOMOG_OUTPUT_DIR)",
    )
    parser.add_argument(
        "--resolution",
        type=int,
        default=None,
        help="Cell grid points per axis (overrides the config file)",
    )
    parser.add_argument(
        "--tol",
        type=float,
        default=None,
        help="Relative solver tolerance (overrides the config file)",
    )
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default="INFO",
        help="Set log level (default: INFO)",
    )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the verification CLI."""
    args = build_parser().parse_args(argv)

    setup_logging(level=args.log_level)
    logger = get_logger(__name__)

    try:
        config = load_run_config(
            args.config,
            mode=args.mode,
            resolution=args.resolution,
            tol=args.tol,
            output_dir=args.out,
        )
    except BlochHomogError as e:
        logger.error("Configuration error (%s): %s", e.reason, e.message)
        return EXIT_CONFIG_ERROR

    logger.info("Running %s (N=%d, n=%d)", config.mode, config.dimension, config.resolution)
    try:
        report, code = run(config)
    except Exception as e:
        logger.error("Unexpected failure: %s", e, exc_info=True)
        return EXIT_SOLVER_ERROR

    failed = report.failed_checks
    print(f"\n{len(report.checks) - len(failed)}/{len(report.checks)} checks passed")
    for check in failed:
        print(f"  FAILED {check.name}: value={check.value} threshold={check.threshold} ({check.reason})")
    if report.error:
        print(f"  ERROR {report.error['reason']}: {report.error['message']}")
    return code


if __name__ == "__main__":
    sys.exit(main())
