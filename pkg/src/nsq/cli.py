"""CLI entry point: symmetries, noether, quantize, solve and check."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence

from nsq import __version__
from nsq.config import Settings, load_settings
from nsq.errors import SchemaError, UsageError
from nsq.tools.report import EXIT_USAGE, RunReport

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsq", description="Noether-symmetry-preserving quantization workbench")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--json", action="store_true", help="Print the report as JSON")
    parser.add_argument("--seed", type=int, default=None, help="Seed for random sampling (NSQ_SEED)")
    parser.add_argument("--tol", type=float, default=None, help="RK tolerance (NSQ_TOL)")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("symmetries", help="Verify point symmetries of the goldfish system")
    p.add_argument("--n", type=int, default=2)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--catalog", action="store_true", help="The fifteen two-body generators")
    group.add_argument("--field", action="append", default=[], help='JSON {"xi": ..., "etas": [...]}')
    p.add_argument("--catalog-path", default=None, help="Catalog JSON to use instead of the built-in one")
    p.add_argument("--export", default=None, help="Write the verified fields as catalog JSON")

    p = sub.add_parser("noether", help="Noether condition, gauges and first integrals (N=2)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--all", action="store_true", dest="all_generators")
    group.add_argument("--index", type=int)
    p.add_argument("--catalog-path", default=None)

    p = sub.add_parser("quantize", help="Build the Schrödinger equation for N particles")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--e0", default="E0", help="E0 (symbolic) or an exact number")
    p.add_argument("--verify-symmetries", action="store_true")
    p.add_argument("--out", default=None, help="Write the equation as JSON")
    p.add_argument("--from", dest="source", default=None, help="Check an equation read from JSON")
    p.add_argument("--points", type=int, default=None, help="Residual sample count (NSQ_SAMPLE_POINTS)")

    p = sub.add_parser("solve", help="Goldfish positions at given times")
    p.add_argument("--init", required=True, help="InitialData JSON")
    times = p.add_mutually_exclusive_group()
    times.add_argument("--t", type=float, default=None)
    times.add_argument("--grid", default=None, help="start:stop:count")
    p.add_argument("--method", default="both", choices=["algebraic", "rk", "both"])
    p.add_argument("--out", default=None, help="Write the trajectory (.csv or .json)")

    p = sub.add_parser("check", help="Run the full self-test")
    p.add_argument("--full", action="store_true", help="Add the N=4 symbolic checks")
    p.add_argument("--catalog-path", default=None)
    return parser


def _configure_logging(settings: Settings, verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level, logging.WARNING)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _dispatch(args: argparse.Namespace, settings: Settings) -> RunReport:
    seed = settings.seed if args.seed is None else args.seed
    tol = settings.tol if args.tol is None else args.tol
    catalog_path = getattr(args, "catalog_path", None) or settings.catalog_path

    if args.command == "symmetries":
        from nsq.tools.symmetries import run_symmetries

        return run_symmetries(args.n, args.catalog, args.field, catalog_path, args.export)
    if args.command == "noether":
        from nsq.tools.noether import run_noether

        return run_noether(args.all_generators, args.index, catalog_path)
    if args.command == "quantize":
        from nsq.tools.quantize import run_quantize

        return run_quantize(
            n=args.n,
            e0=args.e0,
            verify_symmetries=args.verify_symmetries,
            out=args.out,
            source=args.source,
            seed=seed,
            points=args.points or settings.sample_points,
            numeric_e0=settings.e0,
        )
    if args.command == "solve":
        from nsq.tools.solve import run_solve

        return run_solve(args.init, t=args.t, grid=args.grid, method=args.method, tol=tol, out=args.out)
    from nsq.tools.check import run_check

    return run_check(
        full=args.full,
        catalog_path=catalog_path,
        seed=seed,
        tol=tol,
        concurrency=settings.concurrency,
    )


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the command and print its report. Returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0

    settings = load_settings()
    _configure_logging(settings, args.verbose)

    try:
        report = _dispatch(args, settings)
    except (UsageError, SchemaError) as e:
        print(f"nsq {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE

    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.render())
    logger.info("%s finished: %s in %.2fs", report.command, report.status, report.elapsed_s)
    return report.exit_code


def main() -> None:
    """Console script."""
    sys.exit(run())


if __name__ == "__main__":
    main()
