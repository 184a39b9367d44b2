"""Tests that query and benchmark settings are validated."""

import unittest
from unittest.mock import MagicMock, patch

import app.query_config as qc
from app.query_config import DEFAULT_JOBS, DEFAULT_MAX_LEN, DEFAULT_MAX_PATHS, BenchSettings, EnumerationLimits


class TestEnumerationLimits(unittest.TestCase):
    """Invalid limits fall back to their defaults."""

    def setUp(self) -> None:
        self.mock_logger = MagicMock()
        self.logger_patch = patch("app.query_config.logger", self.mock_logger)
        self.logger_patch.start()

    def tearDown(self) -> None:
        self.logger_patch.stop()
        return super().tearDown()

    def test_default_values(self) -> None:
        limits = EnumerationLimits()
        self.assertEqual(limits.max_paths, DEFAULT_MAX_PATHS)
        self.assertEqual(limits.max_len, DEFAULT_MAX_LEN)
        self.mock_logger.error.assert_not_called()

    def test_valid_values(self) -> None:
        limits = EnumerationLimits(max_paths=3, max_len=100)
        self.assertEqual((limits.max_paths, limits.max_len), (3, 100))

    def test_invalid_values_fall_back(self) -> None:
        limits = EnumerationLimits(max_paths=0, max_len="long")  # type: ignore[arg-type]
        self.assertEqual((limits.max_paths, limits.max_len), (DEFAULT_MAX_PATHS, DEFAULT_MAX_LEN))
        self.assertEqual(self.mock_logger.error.call_count, 2)


class TestBenchSettings(unittest.TestCase):
    def setUp(self) -> None:
        self.mock_logger = MagicMock()
        self.logger_patch = patch("app.query_config.logger", self.mock_logger)
        self.logger_patch.start()

    def tearDown(self) -> None:
        self.logger_patch.stop()
        return super().tearDown()

    def test_valid_settings(self) -> None:
        settings = BenchSettings(test=3, sizes=[4, 250], jobs=2)
        self.assertEqual((settings.test, settings.sizes, settings.jobs), (3, [4, 250], 2))

    def test_unknown_test(self) -> None:
        for test in qc.BENCH_TESTS:
            BenchSettings(test=test)
        with self.assertRaises(ValueError):
            BenchSettings(test=4)
        self.mock_logger.error.assert_called_once()

    def test_bad_sizes(self) -> None:
        with self.assertRaises(ValueError):
            BenchSettings(test=1, sizes=[10, 0])

    def test_bad_jobs_fall_back(self) -> None:
        settings = BenchSettings(test=2, sizes=[5], jobs=-3)
        self.assertEqual(settings.jobs, DEFAULT_JOBS)
        self.mock_logger.error.assert_called_once()


if __name__ == "__main__":
    unittest.main()
