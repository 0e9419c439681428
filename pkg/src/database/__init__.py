"""Database module."""

from src.database.models import (
    db,
    RunStatus,
    SweepRecord,
    SweepRun,
    initialize_database,
    close_database,
    get_run_by_id,
    load_rows,
    record_sweep,
)

__all__ = [
    "db",
    "RunStatus",
    "SweepRecord",
    "SweepRun",
    "initialize_database",
    "close_database",
    "get_run_by_id",
    "load_rows",
    "record_sweep",
]
