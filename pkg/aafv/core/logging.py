import logging
import time
from contextlib import contextmanager
from typing import Iterator, Union

from aafv.core.errors import ParameterError

LOG_FORMAT = "%(levelname)-5.5s [%(name)s] %(message)s"


def configure_logging(level: Union[int, str] = logging.INFO) -> None:
    """
    Configure root logging once for the process.

    Parameters:
    - level: Logging level name or number
    """
    if isinstance(level, str):
        name = level.upper()
        level = logging.getLevelName(name)
        if not isinstance(level, int):
            raise ParameterError(f"unknown log level {name!r}")
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger().setLevel(level)


@contextmanager
def log_duration(logger: logging.Logger, label: str) -> Iterator[None]:
    """Log the start, end and elapsed time of a unit of work."""
    start_time = time.perf_counter()
    logger.info(f"Start: {label}")
    try:
        yield
    except Exception as e:
        logger.error(f"Error in {label}: {str(e)}")
        raise
    process_time = time.perf_counter() - start_time
    logger.info(f"Done: {label} Time: {process_time:.2f}s")
