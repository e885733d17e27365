import logging
import sys
from typing import Optional, Sequence

from aafv.cli.cli import build_parser
from aafv.core.config import settings
from aafv.core.errors import AAFVError
from aafv.core.logging import configure_logging

logger = logging.getLogger("aafv")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Command-line entry point.

    Exit codes: 0 success, 1 validation error, 2 runtime failure,
    3 privacy audit violation.
    """
    configure_logging(settings.LOG_LEVEL)
    try:
        args = build_parser().parse_args(argv)
        if args.log_level:
            configure_logging(args.log_level)
        return args.handler(args)
    except AAFVError as exc:
        logger.error(f"[{exc.error_code}] {exc.detail}")
        return exc.exit_code
    except Exception:
        logger.exception("An unexpected error occurred")
        return 2


if __name__ == "__main__":
    sys.exit(main())
