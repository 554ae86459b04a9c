import argparse
import logging
import sys
from typing import List, Optional

from src.config import settings
from src.exceptions import ConfigParseError
from src.pipelines import BUILTIN_SCENARIOS, COMMANDS, get_scenario, load_scenario, run_scenario
from src.reports.writer import FORMATS, ReportWriter
from src.utils.formatters import format_report_summary, format_scenario_list
from src.verify import VERIFY_MODULES, ALIASES, verify_suite

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


# Configure logging
def setup_logging() -> None:
    """Set up application logging."""
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if settings.log_file:
        handlers.append(logging.FileHandler(settings.log_file))

    logging.basicConfig(
        level=getattr(logging, settings.log_level),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
    )


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", metavar="DIR", help="directory for report.json and CSV tables")
    parser.add_argument("--seed", type=int, help="seed of the random test-lattice points")
    parser.add_argument("--tol-scale", type=float, dest="tol_scale", help="multiply every tolerance")
    parser.add_argument("--format", choices=FORMATS, default="both", dest="fmt", help="artifact format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m src.main",
        description="Dislocation geometry of continuously dislocated crystals: scenarios and invariant checks.",
    )
    parser.add_argument("--list-scenarios", action="store_true", help="print the built-in scenarios and exit")
    subparsers = parser.add_subparsers(dest="command")

    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=f"run a {command} scenario")
        source = sub.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", metavar="PATH", help="YAML scenario file")
        source.add_argument("--scenario", metavar="NAME", help="built-in scenario name")
        _common(sub)

    verify = subparsers.add_parser("verify", help="run the seeded invariant suite")
    verify.add_argument("modules", nargs="*", metavar="MODULE",
                        help=f"modules to check (default all): {', '.join(VERIFY_MODULES)}; "
                             f"aliases {', '.join(sorted(ALIASES))}")
    _common(verify)
    return parser


def _run_command(args: argparse.Namespace) -> int:
    config = load_scenario(args.config) if args.config else get_scenario(args.scenario)
    if config.command != args.command:
        raise ConfigParseError(f"scenario '{config.scenario}' is a {config.command} scenario, "
                               f"not {args.command}", field="command")
    output_dir = args.out or config.output_dir or settings.output_dir
    report = run_scenario(config, output_dir=output_dir, fmt=args.fmt, seed=args.seed, tol_scale=args.tol_scale)
    print(format_report_summary(report))
    return EXIT_PASS if report.passed else EXIT_FAILURE


def _run_verify(args: argparse.Namespace) -> int:
    report = verify_suite(args.modules, seed=args.seed, tol_scale=args.tol_scale)
    if args.out:
        ReportWriter(args.out, args.fmt).write(report)
    print(format_report_summary(report))
    return EXIT_PASS if report.passed else EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return the exit code.

    0 when every hard check passes, 1 for a failed check or a domain error,
    2 for usage and configuration errors.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PASS if e.code in (0, None) else EXIT_USAGE

    if args.list_scenarios:
        print(format_scenario_list(BUILTIN_SCENARIOS))
        return EXIT_PASS
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "verify":
            return _run_verify(args)
        return _run_command(args)
    except ConfigParseError as e:
        logging.error(f"Configuration error: {e}")
        return EXIT_USAGE
    except ValueError as e:
        logging.error(f"Invalid input: {e}")
        return EXIT_USAGE
    except Exception as e:
        logging.exception(f"Error running {args.command}: {str(e)}")
        return EXIT_FAILURE


if __name__ == "__main__":
    setup_logging()
    sys.exit(main())
