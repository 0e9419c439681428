"""Peewee database models for sweep results."""

from __future__ import annotations

import math
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any

from peewee import (
    AutoField,
    CharField,
    DateTimeField,
    FloatField,
    ForeignKeyField,
    IntegerField,
    Model,
    SqliteDatabase,
    TextField,
)

from src.config import get_config
from src.simulation.sweep import ExperimentRow

# bound to a file by initialize_database()
db = SqliteDatabase(None)


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class BaseModel(Model):
    """Binds every table to the sweep database."""

    class Meta:
        database = db


class RunStatus(str, Enum):
    """Status of a sweep run."""
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class SweepRun(BaseModel):
    """One invocation of a sweep, with the settings it ran under."""

    id: int = AutoField()
    label: str = CharField(max_length=255, default="")
    settings: str = TextField(default="{}")  # JSON
    status: str = CharField(max_length=50, default=RunStatus.RUNNING.value)
    created_at: datetime = DateTimeField(default=_utcnow)
    completed_at: datetime | None = DateTimeField(null=True)
    row_count: int = IntegerField(default=0)

    class Meta:
        table_name = "sweep_runs"

    def mark_completed(self, row_count: int) -> None:
        self.status = RunStatus.COMPLETED.value
        self.completed_at = _utcnow()
        self.row_count = row_count
        self.save()

    def mark_failed(self) -> None:
        self.status = RunStatus.FAILED.value
        self.completed_at = _utcnow()
        self.save()


class SweepRecord(BaseModel):
    """A single experiment row."""

    id: int = AutoField()
    run: SweepRun = ForeignKeyField(SweepRun, backref="records", on_delete="CASCADE")
    seed: int = IntegerField()
    num_pus: int = IntegerField()
    num_sus: int = IntegerField()
    mechanism: str = CharField(max_length=50)
    total_pu_utility: float | None = FloatField(null=True)
    total_su_utility: float | None = FloatField(null=True)
    matched_pairs: int = IntegerField()
    rounds: int = IntegerField()
    runtime_ms: float = FloatField()
    status: str = CharField(max_length=100)

    class Meta:
        table_name = "sweep_records"

    @classmethod
    def from_row(cls, run: SweepRun, row: ExperimentRow) -> dict[str, Any]:
        """Insert payload for ``row``; NaN utilities of failed cells become NULL."""
        return {
            "run": run,
            "seed": row.seed,
            "num_pus": row.M,
            "num_sus": row.N,
            "mechanism": row.mechanism,
            "total_pu_utility": None if math.isnan(row.total_pu_utility) else row.total_pu_utility,
            "total_su_utility": None if math.isnan(row.total_su_utility) else row.total_su_utility,
            "matched_pairs": row.matched_pairs,
            "rounds": row.rounds,
            "runtime_ms": row.runtime_ms,
            "status": row.status,
        }

    def to_row(self) -> ExperimentRow:
        return ExperimentRow(
            seed=self.seed,
            M=self.num_pus,
            N=self.num_sus,
            mechanism=self.mechanism,
            total_pu_utility=math.nan if self.total_pu_utility is None else self.total_pu_utility,
            total_su_utility=math.nan if self.total_su_utility is None else self.total_su_utility,
            matched_pairs=self.matched_pairs,
            rounds=self.rounds,
            runtime_ms=self.runtime_ms,
            status=self.status,
        )


def initialize_database(db_path: Path | None = None) -> None:
    """
    Open the sweep database and create missing tables.

    Args:
        db_path: SQLite file; defaults to the configured database_path
    """
    if db_path is None:
        db_path = get_config().database_path

    Path(db_path).parent.mkdir(parents=True, exist_ok=True)
    db.init(str(db_path))
    db.connect(reuse_if_open=True)
    db.create_tables([SweepRun, SweepRecord], safe=True)


def close_database() -> None:
    """Close the database connection."""
    if not db.is_closed():
        db.close()


def record_sweep(rows: list[ExperimentRow], label: str = "", settings: str = "{}") -> SweepRun:
    """Store a finished sweep and its rows in one transaction."""
    with db.atomic():
        run = SweepRun.create(label=label, settings=settings)
        payload = [SweepRecord.from_row(run, row) for row in rows]
        for start in range(0, len(payload), 500):
            SweepRecord.insert_many(payload[start:start + 500]).execute()
        run.mark_completed(len(rows))
    return run


def get_run_by_id(run_id: int) -> SweepRun | None:
    return SweepRun.get_or_none(SweepRun.id == run_id)


def load_rows(run_id: int) -> list[ExperimentRow]:
    """Rows of a stored sweep, in canonical order."""
    records = SweepRecord.select().where(SweepRecord.run == run_id)
    return sorted((record.to_row() for record in records), key=ExperimentRow.sort_key)
