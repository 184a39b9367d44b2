"""Persistence for benchmark runs.

Each run gets a row in `bench_run` and one `bench_row` row per grammar/size cell. SQLite is
enough here since only one process writes a run at a time. Records are read back into pandas
DataFrames, which is also the shape they are exported in.
"""

from dataclasses import asdict, fields
from datetime import datetime
from pathlib import Path

import pandas as pd
from sqlalchemy import BigInteger, Boolean, DateTime, ForeignKey, Integer, String, create_engine, exc
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column, sessionmaker

from app.bench import BenchRecord
from app.logger_config import setup_logger
from app.utils import export_filename, get_data_path

RECORD_COLUMNS = [f.name for f in fields(BenchRecord)]


class Base(DeclarativeBase):
    """Declarative base class shared by all models."""


class BenchRun(Base):
    """Metadata for each benchmark run."""

    __tablename__ = "bench_run"

    id: Mapped[int] = mapped_column(primary_key=True)
    test: Mapped[int] = mapped_column(Integer, index=True)
    started: Mapped[datetime] = mapped_column(DateTime)
    finished: Mapped[datetime | None] = mapped_column(DateTime, nullable=True)
    exported: Mapped[bool] = mapped_column(Boolean, default=False)


class BenchRow(Base):
    """One measured (query, size) cell of a run."""

    __tablename__ = "bench_row"

    id: Mapped[int] = mapped_column(primary_key=True)
    run: Mapped[int] = mapped_column(Integer, ForeignKey("bench_run.id", ondelete="CASCADE"), index=True)
    test: Mapped[int] = mapped_column(Integer)
    query: Mapped[str] = mapped_column(String(32))
    nodes: Mapped[int] = mapped_column(Integer)
    edges: Mapped[int] = mapped_column(Integer)
    nonterminals: Mapped[int] = mapped_column(Integer)
    # sums of path lengths outgrow 32 bits at a few thousand nodes
    output: Mapped[int] = mapped_column(BigInteger)
    max: Mapped[int] = mapped_column(BigInteger)
    paths: Mapped[int] = mapped_column(BigInteger)
    minimize_ns: Mapped[int] = mapped_column(BigInteger)
    produce_ns: Mapped[int] = mapped_column(BigInteger)
    path_length: Mapped[int] = mapped_column(BigInteger)


def setup_session(db_path: Path | str) -> sessionmaker:
    """Create the Session, creating the tables if needed.

    Args:
        db_path (Path | str): The database file, or ":memory:" for a throwaway database.

    Returns:
        sessionmaker: A sessionmaker instance bound to the engine.
    """
    engine = create_engine(f"sqlite:///{db_path}")
    Base.metadata.create_all(engine)
    return sessionmaker(bind=engine)


class BenchDb:
    """Handles interactions with the database of benchmark runs: starting and finishing runs,
    writing measured rows, reading them back as DataFrames, exporting and deleting runs.
    """

    def __init__(self, session=None, logger=None) -> None:
        self.logger = logger if logger else setup_logger()

        self.session = session if session else setup_session(get_data_path("bench.db"))

        self.run_id: int | None = None

    def start_run(self, test: int) -> int:
        """Starts a new run and writes it to the database.

        Args:
            test (int): The benchmark test id.

        Returns:
            int: The ID of the started run.

        Raises:
            ValueError: If another run is still active.
        """
        if self.run_id is not None:
            error_msg = "Attempted to start a new run while another is active."
            self.logger.error(error_msg)
            raise ValueError(error_msg)

        with self.session() as sess:
            run = BenchRun(test=test, started=datetime.now())
            sess.add(run)
            sess.commit()
            # run_id is assigned on commit
            sess.refresh(run)

        self.run_id = run.id
        self.logger.debug("Started bench run %s for test %s", self.run_id, test)
        return self.run_id

    def finish_run(self) -> None:
        """Records the finish time of the active run and clears it.

        Raises:
            ValueError: If no run is active or it vanished from the database.
        """
        if self.run_id is None:
            error_msg = "Attempted to finish a run when no run is active."
            self.logger.error(error_msg)
            raise ValueError(error_msg)

        with self.session() as sess:
            run = sess.get(BenchRun, self.run_id)
            if run is None:
                error_msg = f"No run found with ID {self.run_id}."
                self.logger.error(error_msg)
                raise ValueError(error_msg)
            run.finished = datetime.now()
            sess.commit()
        self.run_id = None

    def write_record(self, record: BenchRecord) -> None:
        """Stores one record against the active run.

        Raises:
            ValueError: If no run is active.
            sqlalchemy.exc.SQLAlchemyError: If the write fails.
        """
        if self.run_id is None:
            error_msg = "Attempted to write a record when no run is active."
            self.logger.error(error_msg)
            raise ValueError(error_msg)

        with self.session() as sess:
            sess.add(BenchRow(run=self.run_id, **asdict(record)))
            sess.commit()

    def records(self, run_id: int) -> pd.DataFrame | None:
        """Fetches the rows of a run, in the order they were written.

        Args:
            run_id (int): The ID of the run.

        Returns:
            DataFrame or None: One row per record with the `BenchRecord` columns, or None if
            the run does not exist or has no rows.
        """
        with self.session() as sess:
            if sess.get(BenchRun, run_id) is None:
                self.logger.warning("Run %s not found", run_id)
                return None

            columns = [getattr(BenchRow, name) for name in RECORD_COLUMNS]
            rows = sess.query(*columns).filter(BenchRow.run == run_id).order_by(BenchRow.id).all()

        if not rows:
            self.logger.warning("No records found for run %s", run_id)
            return None

        return pd.DataFrame([tuple(row) for row in rows], columns=RECORD_COLUMNS)

    def export_run(self, run_id: int, folder_path: Path | str) -> Path | None:
        """Exports the rows of a run to a TSV file named after its test and start time.

        Args:
            run_id (int): The ID of the run to export.
            folder_path (Path | str): The directory to save the file in.

        Returns:
            Path or None: The written file, or None if there was nothing to export or the
            write failed.
        """
        df = self.records(run_id)
        if df is None:
            self.logger.error("Cannot export run %s because it has no records.", run_id)
            return None

        with self.session() as sess:
            run = sess.get(BenchRun, run_id)
            assert run is not None
            filename = export_filename(f"bench-{run.test}", run.started)

        full_path = Path(folder_path) / filename
        try:
            df.to_csv(full_path, sep="\t", index=False)
        except OSError as err:
            self.logger.error("Export of run %s failed: %s", run_id, err)
            return None

        self.mark_exported(run_id)
        self.logger.debug("Exported run %s to %s", run_id, full_path)
        return full_path

    def delete_run(self, run_id: int) -> bool:
        """Deletes a run and its rows.

        Returns:
            bool: True if the run existed and was deleted.
        """
        try:
            with self.session() as sess:
                run = sess.get(BenchRun, run_id)
                if run is None:
                    self.logger.error("Cannot delete run %s because it does not exist.", run_id)
                    return False
                sess.query(BenchRow).filter(BenchRow.run == run_id).delete()
                sess.delete(run)
                sess.commit()
        except exc.SQLAlchemyError as err:
            self.logger.critical("Deleting run %s failed: %s", run_id, err)
            return False

        self.logger.debug("Run %s deleted successfully.", run_id)
        return True

    def get_runs(self) -> list[tuple[int, int, datetime, datetime | None, bool]]:
        """All runs as (id, test, started, finished, exported) tuples."""
        with self.session() as sess:
            runs = sess.query(BenchRun).order_by(BenchRun.id).all()
            return [(run.id, run.test, run.started, run.finished, run.exported) for run in runs]

    def mark_exported(self, run_id: int) -> bool:
        """Marks a run as exported.

        Returns:
            bool: True if the run was found and marked.
        """
        try:
            with self.session() as sess:
                run = sess.get(BenchRun, run_id)
                if run is not None:
                    run.exported = True
                    sess.commit()
                    return True
                self.logger.critical("No run found with ID %s", run_id)
        except exc.SQLAlchemyError as err:
            self.logger.debug("Failed to mark run as exported due to: %s", err)
        return False
