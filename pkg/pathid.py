"""Path-identity photonic simulator - command-line entry point."""

import argparse
import logging
import sys
from typing import List, Optional, Sequence

from dotenv import load_dotenv

from commands.graphs import setup_graph_commands
from commands.make import setup_make_commands
from commands.simulate import setup_simulate_commands
from commands.verify import setup_verify_commands
from config import settings

logger = logging.getLogger(__name__)

load_dotenv()


class UsageError(Exception):
    """Raised by CommandParser instead of exiting with argparse's status 2."""


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser that reports bad usage with exit code 1; 2 means an empty post-selection."""

    def error(self, message: str) -> None:
        raise UsageError(message)


def configure_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL, logging.INFO)
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if settings.LOG_FILE:
        handlers.append(logging.FileHandler(settings.LOG_FILE))
    logging.basicConfig(level=level, format=settings.LOG_FORMAT, handlers=handlers, force=True)


def build_parser() -> CommandParser:
    parser = CommandParser(
        prog='pathid',
        description='Simulate path-identity photonic circuits and compare them with experiment graphs.',
        epilog='Exit codes: 0 success or PASS, 1 error or FAIL, 2 empty post-selection.',
    )
    parser.add_argument('--verbose', action='store_true', help='Log at DEBUG level')
    parser.add_argument('--seed', type=int, default=settings.DEFAULT_SEED, help='Seed for randomized checks')
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND', required=True)

    setup_simulate_commands(subparsers)
    setup_graph_commands(subparsers)
    setup_verify_commands(subparsers)
    setup_make_commands(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(parser.format_usage(), end='', file=sys.stderr)
        print(settings.MSG_ERROR.format(error=e), file=sys.stderr)
        return settings.EXIT_ERROR

    configure_logging(args.verbose)
    logger.debug(f"Running {args.command}")
    return args.handler(args)


if __name__ == '__main__':
    sys.exit(main())
