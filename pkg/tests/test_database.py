"""Tests for storing sweep rows in SQLite."""

from __future__ import annotations

import math

from peewee import SqliteDatabase

from src.database import RunStatus, SweepRecord, SweepRun, get_run_by_id, load_rows, record_sweep
from src.simulation import ExperimentRow


def make_rows() -> list[ExperimentRow]:
    return [
        ExperimentRow(seed=1, M=2, N=3, mechanism="g_rdac", total_pu_utility=0.4, total_su_utility=1.1,
                      matched_pairs=2, rounds=17, runtime_ms=3.5),
        ExperimentRow(seed=0, M=2, N=3, mechanism="g_dac", total_pu_utility=0.9, total_su_utility=0.2,
                      matched_pairs=2, rounds=9, runtime_ms=2.0),
        ExperimentRow(seed=0, M=2, N=3, mechanism="g_rdac", total_pu_utility=math.nan,
                      total_su_utility=math.nan, matched_pairs=0, rounds=0, runtime_ms=0.5,
                      status="IterationCapExceeded"),
    ]


def test_round_trip(test_db: SqliteDatabase) -> None:
    rows = make_rows()

    run = record_sweep(rows, label="unit", settings='{"seeds": 2}')
    loaded = load_rows(run.id)

    assert len(loaded) == 3
    assert loaded[0] == rows[1]
    assert loaded[2] == rows[0]
    assert loaded[1].status == "IterationCapExceeded"
    assert math.isnan(loaded[1].total_pu_utility)


def test_failed_rows_store_null(test_db: SqliteDatabase) -> None:
    run = record_sweep(make_rows())

    failed = SweepRecord.get(SweepRecord.run == run, SweepRecord.status != "ok")
    assert failed.total_pu_utility is None
    assert failed.total_su_utility is None


def test_run_bookkeeping(test_db: SqliteDatabase) -> None:
    run = record_sweep(make_rows(), label="unit")

    stored = get_run_by_id(run.id)
    assert stored is not None
    assert stored.status == RunStatus.COMPLETED.value
    assert stored.row_count == 3
    assert stored.completed_at is not None
    assert get_run_by_id(run.id + 100) is None


def test_runs_are_kept_apart(test_db: SqliteDatabase) -> None:
    first = record_sweep(make_rows()[:1])
    second = record_sweep(make_rows())

    assert len(load_rows(first.id)) == 1
    assert len(load_rows(second.id)) == 3
    assert SweepRun.select().count() == 2


def test_mark_failed(test_db: SqliteDatabase) -> None:
    run = SweepRun.create(label="broken")

    run.mark_failed()

    assert get_run_by_id(run.id).status == "failed"
