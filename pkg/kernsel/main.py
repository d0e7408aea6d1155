#!/usr/bin/env python3
"""
kernsel command-line entry point.

Exit codes: 0 on success, 2 on a configuration error, 3 on a data error.
"""
import argparse
import logging
import sys
from typing import Optional, Sequence

from . import __version__
from .cli import COMMANDS
from .errors import ConfigurationError, DataError, InputDomainError, KernselError
from .utils.logger import setup_logger

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kernsel",
        description="Penalized least-squares kernel selection for density estimation"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the subcommand and map errors to exit codes."""
    args = build_parser().parse_args(argv)
    setup_logger()
    logger = logging.getLogger(__name__)

    try:
        return args.handler(args)
    except ConfigurationError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except (DataError, InputDomainError) as e:
        logger.error(f"Data error: {e}")
        return EXIT_DATA
    except KernselError as e:
        logger.error(f"Computation failed: {e}")
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
