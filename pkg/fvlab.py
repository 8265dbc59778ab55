# fvlab.py
"""
fvlab - Main entry point.
Runs lattice measurement experiments from JSON configs and writes reports.

Exit codes:
    0  every check passed
    1  a physics check failed
    2  usage, configuration or geometry error
"""
import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

from config import Config, ConfigurationError
from fv_system.errors import FVError
from fv_system.events.setup import setup_verification_event_handlers
from fv_system.experiments import ExperimentRunner, parse_config
from fv_system.reports import CSVGenerator, ReportBuilder

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def setup_logging() -> None:
    """Stream handler on stderr (stdout carries reports) plus the log file."""
    logging.basicConfig(
        level=getattr(logging, str(Config.get(Config.LOG_LEVEL)).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stderr),
            logging.FileHandler(Config.get(Config.LOG_FILE))
        ]
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=Config.TOOL_NAME,
        description="Verify probe-based measurement updates on a finite causal lattice.",
    )
    parser.add_argument("--config", required=True, help="experiment config (JSON)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--tolerance", type=float, default=None, help="override the config tolerance")
    parser.add_argument("--trials", type=int, default=None, help="override the config trial count")
    parser.add_argument("--out", default=None, help="report path (stdout if omitted)")
    parser.add_argument("--format", choices=("json", "csv"), default="json",
                        help="csv also writes the flattened CSV summary next to the JSON report")
    parser.add_argument("--csv-out", default=None, help="CSV summary path (default: --out with a .csv suffix)")
    parser.add_argument("--timings", action="store_true", help="include wall time in the report")
    parser.add_argument("--version", action="version", version=f"{Config.TOOL_NAME} {Config.TOOL_VERSION}")
    return parser


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text, encoding="utf-8")
    logger.info(f"Report written to {out}")


def csv_path(args: argparse.Namespace) -> Optional[Path]:
    """Where the CSV summary goes, or None when it is not requested. --csv-out implies csv."""
    if args.csv_out:
        return Path(args.csv_out)
    if args.format == "csv" and args.out:
        return Path(args.out).with_suffix(".csv")
    return None


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one experiment and write its report.

    Args:
        argv: Argument list (sys.argv[1:] if None)

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        summary_path = csv_path(args)
        if args.format == "csv" and summary_path is None:
            parser.error("--format csv needs --out or --csv-out")
        if summary_path is not None and args.out and summary_path == Path(args.out):
            parser.error("the CSV summary would overwrite the JSON report; pass --csv-out")
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        # ═══════════════════════════════════════════════════════════════════════
        # STEP 1: Parse and validate the experiment config
        # ═══════════════════════════════════════════════════════════════════════
        logger.info(f"📋 Loading experiment config {args.config}...")
        experiment = parse_config(args.config, seed=args.seed, tolerance=args.tolerance, trials=args.trials)
        logger.info(f"✓ Config valid: {experiment.config.experiment} (digest {experiment.digest[:12]})")

        # ═══════════════════════════════════════════════════════════════════════
        # STEP 2: Run checks
        # ═══════════════════════════════════════════════════════════════════════
        logger.info("🔬 Running checks...")
        started = time.perf_counter()
        checks = ExperimentRunner(experiment).run()
        wall_time = time.perf_counter() - started
        logger.info(f"✓ {len(checks)} check(s) finished in {wall_time:.3f}s")

    except (ConfigurationError, FVError) as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_USAGE

    # ═══════════════════════════════════════════════════════════════════════
    # STEP 3: Write report
    # ═══════════════════════════════════════════════════════════════════════
    report = ReportBuilder(experiment)
    timing = wall_time if args.timings else None
    body = report.build(checks, timing)
    _write(report.to_json(checks, timing), args.out)
    if summary_path is not None:
        _write(CSVGenerator().generate_for(body), str(summary_path))

    for check in checks:
        status = "✓" if check.passed else "✗"
        logger.info(f"{status} {check.name}")

    if body["passed"]:
        logger.info("✅ All checks passed")
        return EXIT_OK
    logger.warning("⚠️ At least one check failed")
    return EXIT_CHECK_FAILED


def main() -> None:
    try:
        Config.initialize_from_env()
    except ConfigurationError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        sys.exit(EXIT_USAGE)

    setup_logging()
    logger.info("=" * 60)
    logger.info(f"{Config.TOOL_NAME.upper()} {Config.TOOL_VERSION}")
    logger.info("=" * 60)
    setup_verification_event_handlers()

    sys.exit(run())


if __name__ == "__main__":
    main()
