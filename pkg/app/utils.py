"""This module houses the more general functionality."""

import os
from datetime import datetime
from pathlib import Path

import appdirs
from pathvalidate import sanitize_filename

APP_NAME = "CFPQ"
DATA_DIR_ENV = "CFPQ_DATA_DIR"


def get_data_path(filename: str = "bench.db", subdirectory: str = "", create: bool = True) -> Path:
    """
    Gets the path to the specified file within the application-specific data directory.

    The directory is resolved by `appdirs` unless the `CFPQ_DATA_DIR` environment variable
    points somewhere else (handy for tests and batch jobs).

    Args:
        filename (str): The name of the file. Defaults to 'bench.db'.
        subdirectory (str): An optional subdirectory within the application data directory.
        create (bool): Whether to create the directory holding the file if it is missing.

    Returns:
        Path: The path object for the file.
    """
    override = os.environ.get(DATA_DIR_ENV)
    app_dir = Path(override) if override else Path(appdirs.user_data_dir(APP_NAME))
    data_path = app_dir / subdirectory / filename
    if create:
        data_path.parent.mkdir(parents=True, exist_ok=True)
    return data_path


def export_filename(prefix: str, stamp: datetime, suffix: str = ".tsv") -> str:
    """Builds a file name that is safe on every platform, e.g. 'bench-3-20240101-1200.tsv'.

    Args:
        prefix (str): Leading part of the name, usually the run description.
        stamp (datetime): Timestamp rendered as '%Y%m%d-%H%M'.
        suffix (str): File extension including the dot.

    Returns:
        str: The sanitized file name.
    """
    return sanitize_filename(f"{prefix}-{stamp.strftime('%Y%m%d-%H%M')}{suffix}")
