"""Tests for general functionality utilities."""

import logging
import os
import tempfile
import unittest
from datetime import datetime
from pathlib import Path
from unittest.mock import patch

import appdirs

from app.logger_config import LogFileHandler, setup_logger
from app.utils import APP_NAME, DATA_DIR_ENV, export_filename, get_data_path


class TestGetDataPath(unittest.TestCase):
    """Test get_data_path function."""

    def setUp(self) -> None:
        self.filename = "test.db"
        self.default_name = "bench.db"

    def test_default_path(self) -> None:
        """Returns the default database file 'bench.db' in the application-specific data directory."""
        with patch.dict(os.environ, {}, clear=False):
            os.environ.pop(DATA_DIR_ENV, None)
            result = get_data_path()

        self.assertIsInstance(result, Path)
        self.assertEqual(result.name, self.default_name)
        self.assertEqual(result.parent, Path(appdirs.user_data_dir(APP_NAME)))

    def test_environment_override(self) -> None:
        """The data directory variable replaces the per-user directory."""
        with tempfile.TemporaryDirectory() as temp_dir, patch.dict(os.environ, {DATA_DIR_ENV: temp_dir}):
            result = get_data_path(self.filename)
            self.assertEqual(result, Path(temp_dir) / self.filename)

    def test_creates_target_directory(self) -> None:
        """Creates a missing subdirectory and returns the file path inside it."""
        with tempfile.TemporaryDirectory() as temp_dir, patch.dict(os.environ, {DATA_DIR_ENV: temp_dir}):
            result = get_data_path("cfpq.log", subdirectory="logs")
            self.assertEqual(result, Path(temp_dir) / "logs" / "cfpq.log")
            self.assertTrue(result.parent.exists())
            self.assertFalse(result.exists())


    def test_without_creating_the_directory(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir, patch.dict(os.environ, {DATA_DIR_ENV: temp_dir}):
            result = get_data_path("cfpq.log", subdirectory="logs", create=False)
            self.assertEqual(result, Path(temp_dir) / "logs" / "cfpq.log")
            self.assertFalse(result.parent.exists())


class TestExportFilename(unittest.TestCase):
    def test_format(self) -> None:
        self.assertEqual(export_filename("bench-3", datetime(2024, 1, 2, 13, 5)), "bench-3-20240102-1305.tsv")

    def test_sanitized(self) -> None:
        name = export_filename("bench/1:q1", datetime(2024, 1, 2, 13, 5), ".csv")
        self.assertNotIn("/", name)
        self.assertNotIn(":", name)
        self.assertTrue(name.endswith("-20240102-1305.csv"))


class TestSetupLogger(unittest.TestCase):
    def test_handlers_added_once(self) -> None:
        """Repeated calls return the same logger without stacking handlers."""
        logger = setup_logger()
        handlers = list(logger.handlers)
        self.assertIs(setup_logger(), logger)
        self.assertEqual(logger.handlers, handlers)
        self.assertEqual(logger.name, "CFPQ")

    def test_console_shows_warnings_only(self) -> None:
        logger = setup_logger()
        console = [h for h in logger.handlers if type(h) is logging.StreamHandler]
        self.assertEqual(len(console), 1)
        self.assertEqual(console[0].level, logging.WARNING)
        self.assertEqual(logger.level, logging.DEBUG)

    def test_log_directory_is_created_on_first_record(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "logs" / "cfpq.log"
            handler = LogFileHandler(path)
            self.assertFalse(path.parent.exists())
            handler.emit(logging.makeLogRecord({"msg": "first", "levelno": logging.INFO}))
            handler.close()
            self.assertTrue(path.exists())
            self.assertIn("first", path.read_text(encoding="utf-8"))


if __name__ == "__main__":
    unittest.main()
