"""
IDEM command-line entry point with OpenTelemetry instrumentation.
"""

import argparse
import logging
import sys
from typing import List, Optional

import pydantic

# Import our modules
from idem import __version__
from idem.commands import degrade, metric, reproduce, sensitivity, sweep
from idem.commands import register as register_cmd
from idem.core.config import Config
from idem.core.observability import setup_telemetry, shutdown_telemetry
from idem.exceptions import IdemError

# Configure logging
logging.basicConfig(
    level=Config.LOG_LEVEL, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)

COMMANDS = (metric, sweep, register_cmd, degrade, sensitivity, reproduce)


def _global_flags(with_defaults: bool) -> argparse.ArgumentParser:
    # subcommands repeat the flags without defaults so values given before the subcommand survive
    def default(value):
        return value if with_defaults else argparse.SUPPRESS

    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--seed", type=int, default=default(Config.DEFAULT_SEED), help="Master random seed")
    parser.add_argument("--jobs", type=int, default=default(Config.DEFAULT_JOBS), help="Worker threads")
    parser.add_argument("--quiet", action="store_true", default=default(False), help="Only warnings and errors")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idem",
        description=Config.APP_DESCRIPTION,
        parents=[_global_flags(with_defaults=True)],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Include subcommands
    for command in COMMANDS:
        command.register_parser(subparsers, parents=[_global_flags(with_defaults=False)])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.quiet:
        logging.getLogger().setLevel(logging.WARNING)
    if args.jobs < 1:
        logger.error(f"--jobs must be >= 1, got {args.jobs}")
        return 3

    logger.info(f"{Config.APP_NAME} {__version__}: {args.command} (seed={args.seed}, jobs={args.jobs})")
    setup_telemetry()
    try:
        return args.handler(args)
    except IdemError as e:
        logger.error(e.detail)
        return e.exit_code
    except pydantic.ValidationError as e:
        logger.error(f"Invalid parameters: {e}")
        return 3
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return 2
    finally:
        shutdown_telemetry()


if __name__ == "__main__":
    sys.exit(main())
