"""
Houses all logging-specific functionality.
"""

import logging
from io import TextIOWrapper
from pathlib import Path

from app.utils import get_data_path

LOGGER_NAME = "CFPQ"
CONSOLE_FORMAT = "%(name)s - %(levelname)s - %(message)s"
FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class LogFileHandler(logging.FileHandler):
    """A file handler that creates the directory of its file when the first record arrives."""

    def __init__(self, path: Path) -> None:
        super().__init__(path, delay=True)

    def _open(self) -> TextIOWrapper:
        Path(self.baseFilename).parent.mkdir(parents=True, exist_ok=True)
        return super()._open()


def setup_logger() -> logging.Logger:
    """
    Returns the application logger, attaching its handlers on first use.

    Standard error gets WARNING and above as '%(name)s - %(levelname)s - %(message)s', so
    standard output carries nothing but query answers. Everything down to DEBUG goes to
    'logs/cfpq.log' in the data directory with a timestamp in front. Neither the file nor
    its directory exists until something is written to it.

    Every module calls this at import time; later calls find the handlers in place and
    return the same logger unchanged.

    Returns:
        logging.Logger: The 'CFPQ' logger.
    """
    logger = logging.getLogger(LOGGER_NAME)
    if logger.handlers:
        return logger

    logger.setLevel(logging.DEBUG)

    console = logging.StreamHandler()
    console.setLevel(logging.WARNING)
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT))

    log_file = LogFileHandler(get_data_path("cfpq.log", subdirectory="logs", create=False))
    log_file.setLevel(logging.DEBUG)
    log_file.setFormatter(logging.Formatter(FILE_FORMAT))

    logger.addHandler(console)
    logger.addHandler(log_file)
    return logger
