import argparse
from typing import NoReturn

from aafv import __version__
from aafv.cli.commands import audit, run, synth
from aafv.core.config import settings
from aafv.core.errors import ParameterError


class CommandParser(argparse.ArgumentParser):
    """argparse with usage errors raised as validation errors (exit 1)."""

    def error(self, message: str) -> NoReturn:
        raise ParameterError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = CommandParser(prog=settings.PROJECT_NAME, description=settings.DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help=f"Logging level (default {settings.LOG_LEVEL})")

    subparsers = parser.add_subparsers(dest="command", metavar="command", parser_class=CommandParser)
    subparsers.required = True
    run.register(subparsers)
    audit.register(subparsers)
    synth.register(subparsers)
    return parser

