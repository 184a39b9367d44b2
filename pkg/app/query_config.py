"""Validated settings for path enumeration and for benchmark runs."""

from dataclasses import dataclass, field

from app.logger_config import setup_logger

logger = setup_logger()

DEFAULT_MAX_PATHS = 10
DEFAULT_MAX_LEN = 32
DEFAULT_JOBS = 1
BENCH_TESTS = (1, 2, 3)


@dataclass
class EnumerationLimits:
    """
    Bounds for all-path queries.

    Attributes:
        max_paths (int): Stop after this many paths. Default value is 10.
        max_len (int): Ignore paths with more edges than this. Default value is 32.
    """

    max_paths: int = DEFAULT_MAX_PATHS
    max_len: int = DEFAULT_MAX_LEN

    def __post_init__(self) -> None:
        """
        Validates and sets the limits to their defaults if they are invalid.
        """
        if not isinstance(self.max_paths, int) or self.max_paths < 1:
            logger.error("Invalid path limit %r, using default.", self.max_paths)
            self.max_paths = DEFAULT_MAX_PATHS

        if not isinstance(self.max_len, int) or self.max_len < 1:
            logger.error("Invalid path length limit %r, using default.", self.max_len)
            self.max_len = DEFAULT_MAX_LEN


@dataclass
class BenchSettings:
    """
    What a benchmark run measures.

    Attributes:
        test (int): Which experiment to run: 1 (q1 against q2), 2 (q1 against {s s s}) or 3
            (matched grammar on double cycles).
        sizes (list[int]): Graph sizes (node counts).
        jobs (int): Worker processes for independent cells. Default value is 1.

    Raises:
        ValueError: If the test id is unknown; a benchmark without a valid test has nothing
            to fall back on.
    """

    test: int
    sizes: list[int] = field(default_factory=list)
    jobs: int = DEFAULT_JOBS

    def __post_init__(self) -> None:
        if self.test not in BENCH_TESTS:
            error_msg = f"Unknown benchmark test {self.test!r}; choose from {', '.join(map(str, BENCH_TESTS))}"
            logger.error(error_msg)
            raise ValueError(error_msg)

        invalid = [size for size in self.sizes if not isinstance(size, int) or size < 1]
        if invalid:
            error_msg = f"Graph sizes must be positive integers, got {invalid}"
            logger.error(error_msg)
            raise ValueError(error_msg)

        if not isinstance(self.jobs, int) or self.jobs < 1:
            logger.error("Invalid job count %r, using default.", self.jobs)
            self.jobs = DEFAULT_JOBS
