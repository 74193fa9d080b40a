"""
Command-line entry point.
Sets up logging from config/settings.yaml and dispatches subcommands.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from loguru import logger

sys.path.insert(0, str(Path(__file__).resolve().parent))

from cli.commands import ExitCode, bounds, simulate, sweep, verify_inequalities, verify_kernel  # noqa: E402
from cli.settings import DEFAULT_SETTINGS_PATH, load_settings  # noqa: E402


def setup_logging(settings: dict):
    """stderr sink at LOG_LEVEL plus a rotating file sink at LOG_FILE."""
    logger.remove()
    logger.add(sys.stderr, level=settings.get('LOG_LEVEL', 'INFO'))

    log_file = settings.get('LOG_FILE')
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logger.add(log_file, rotation="100 MB", level='DEBUG')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fjmgt",
        description="Spectral-Galerkin simulator and bound calculator for the fractionally damped JMGT equation",
    )
    parser.add_argument("--settings", default=DEFAULT_SETTINGS_PATH, help="Runtime settings YAML")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("simulate", help="Integrate one run configuration")
    p.add_argument("config", type=Path, help="Run configuration YAML")
    p.add_argument("--resume", action="store_true", help="Continue from this run's checkpoint")

    p = subparsers.add_parser("sweep", help="Run one configuration over a list of parameter values")
    p.add_argument("config", type=Path, help="Base run configuration YAML")
    p.add_argument("--axis", required=True, choices=["N0", "k", "tau", "c", "delta", "alpha", "cap", "scale"])
    p.add_argument("--values", required=True, type=float, nargs="+")
    p.add_argument("--workers", type=int, default=None, help="Worker processes (default from settings)")

    p = subparsers.add_parser("bounds", help="Existence-time bound T0(N0, T) and T*")
    p.add_argument("--N0", type=float, default=None, help="Initial-data size")
    p.add_argument("--z0", type=float, default=None, help="Comparison ODE initial value (N0 with scale 1)")
    p.add_argument("--C", type=float, required=True, help="C0 of the constant profile")
    p.add_argument("--affine", action="store_true", help="Use C(T) = C0 (1 + T)")
    p.add_argument("--z0-scale", type=float, default=1.0)
    p.add_argument("--T-max", type=float, default=None, help="Curve horizon (default 3 T*)")
    p.add_argument("--samples", type=int, default=201)

    p = subparsers.add_parser("verify-kernel", help="Coercivity report for a memory kernel")
    p.add_argument("--kind", default="abel", choices=["abel", "exponential", "zero"])
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--scale", type=float, default=1.0, help="Exponential kernel amplitude")
    p.add_argument("--corpus-size", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = subparsers.add_parser("verify-inequalities", help="Ratio report for the embedding inequalities")
    p.add_argument("--dim", type=int, required=True, choices=[2, 3])
    p.add_argument("--corpus-size", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = load_settings(args.settings)
    setup_logging(settings)

    output_dir = settings.get('OUTPUT_DIR')
    cache_dir = settings.get('TENSOR_CACHE_DIR')

    if args.command == "simulate":
        code = simulate(str(args.config), output_dir=output_dir, cache_dir=cache_dir, resume=args.resume)
    elif args.command == "sweep":
        code = sweep(
            str(args.config), args.axis, args.values, output_dir=output_dir,
            workers=args.workers or settings['WORKERS'], cache_dir=cache_dir,
        )
    elif args.command == "bounds":
        if (args.N0 is None) == (args.z0 is None):
            logger.error("bounds: give exactly one of --N0 and --z0")
            return int(ExitCode.VALIDATION_FAILURE)
        N0, scale = (args.N0, args.z0_scale) if args.N0 is not None else (args.z0, 1.0)
        code = bounds(
            N0, args.C, affine=args.affine, z0_scale=scale, T_max=args.T_max,
            samples=args.samples, output_dir=output_dir or "output",
        )
    elif args.command == "verify-kernel":
        code = verify_kernel(
            args.kind, alpha=args.alpha, rate=args.rate, scale=args.scale, corpus_size=args.corpus_size,
            seed=args.seed, output_dir=output_dir or "output",
        )
    else:
        code = verify_inequalities(
            args.dim, corpus_size=args.corpus_size, seed=args.seed, output_dir=output_dir or "output",
        )

    return int(code)


if __name__ == "__main__":
    sys.exit(main())
