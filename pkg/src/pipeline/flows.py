"""Prefect flow running an experiment sweep end to end."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import pandas as pd
from prefect import flow, get_run_logger, task

from src.config import SimulatorConfig, get_config, set_config
from src.database import close_database, initialize_database, record_sweep
from src.pipeline.parallel import ParallelExecutionResult, summarize_execution
from src.simulation.sweep import (
    ExperimentRow,
    run_sweep,
    summarize,
    write_rows_csv,
    write_summary_csv,
)

ROWS_FILENAME = "rows.csv"
SUMMARY_FILENAME = "summary.csv"


@dataclass
class SweepOutcome:
    """Files and statistics produced by one sweep flow."""

    execution: ParallelExecutionResult
    rows_path: Path
    summary_path: Path | None
    summary: pd.DataFrame | None
    run_id: int | None = None


def _settings_json(config: SimulatorConfig) -> str:
    return json.dumps(
        {
            "solver": asdict(config.solver),
            "topology": asdict(config.topology),
            "experiment": {
                **asdict(config.experiment),
                "output_directory": str(config.experiment.output_directory),
            },
        },
        sort_keys=True,
    )


# =============================================================================
# Tasks
# =============================================================================

@task(name="run_cells")
def run_cells_task(config: SimulatorConfig, max_workers: int | None) -> list[ExperimentRow]:
    logger = get_run_logger()
    exp = config.experiment

    if config.log_level != "OFF":
        logger.info(
            f"Sweeping M={list(exp.m_values)} N={list(exp.n_values)} "
            f"over {exp.seeds} seed(s) with {list(exp.mechanisms)}"
        )

    def progress(completed: int, total: int, row: ExperimentRow) -> None:
        if config.log_level != "OFF" and (completed == total or completed % 100 == 0):
            logger.info(f"{completed}/{total} cells done")

    return run_sweep(exp, config.topology, config.solver, max_workers, progress)


@task(name="write_rows")
def write_rows_task(rows: list[ExperimentRow], output_dir: Path) -> Path:
    return write_rows_csv(rows, output_dir / ROWS_FILENAME)


@task(name="summarize")
def summarize_task(rows: list[ExperimentRow], output_dir: Path) -> tuple[pd.DataFrame, Path] | None:
    logger = get_run_logger()
    config = get_config()

    if not any(row.ok for row in rows):
        if config.log_level != "OFF":
            logger.error("No cell succeeded; skipping the summary")
        return None

    summary = summarize(rows)
    return summary, write_summary_csv(summary, output_dir / SUMMARY_FILENAME)


@task(name="persist_rows")
def persist_rows_task(rows: list[ExperimentRow], db_path: Path, settings: str) -> int:
    logger = get_run_logger()
    config = get_config()

    initialize_database(db_path)
    try:
        run = record_sweep(rows, label=datetime.now(timezone.utc).isoformat(), settings=settings)
    finally:
        close_database()

    if config.log_level != "OFF":
        logger.info(f"Stored {len(rows)} row(s) as sweep run {run.id}")
    return run.id


# =============================================================================
# Flow
# =============================================================================

@flow(name="equilibrium_sweep")
def equilibrium_sweep(
        config: SimulatorConfig,
        max_workers: int | None = 1,
        db_path: Path | None = None,
) -> SweepOutcome:
    """
    Run a sweep, write the row and summary CSV files and optionally store
    the rows in SQLite.

    Args:
        config: Full simulator configuration; the experiment section picks
            the cells and the output directory
        max_workers: Worker processes for the cells (None = every core)
        db_path: SQLite file to store the rows in; nothing is stored when None

    Returns:
        SweepOutcome with the written paths and the summary table
    """
    logger = get_run_logger()
    set_config(config)
    started_at = datetime.now(timezone.utc)
    output_dir = config.experiment.output_directory

    rows = run_cells_task(config, max_workers)
    execution = summarize_execution(rows, started_at)
    rows_path = write_rows_task(rows, output_dir)

    summarized = summarize_task(rows, output_dir)
    summary, summary_path = summarized if summarized is not None else (None, None)

    run_id = None
    if db_path is not None:
        run_id = persist_rows_task(rows, db_path, _settings_json(config))

    if config.log_level != "OFF":
        logger.info(
            f"Sweep finished: {execution.succeeded}/{execution.total} cells succeeded, "
            f"rows in {rows_path}"
        )
        if execution.failed:
            logger.warning(f"{execution.failed} cell(s) failed; see the status column")

    return SweepOutcome(
        execution=execution,
        rows_path=rows_path,
        summary_path=summary_path,
        summary=summary,
        run_id=run_id,
    )
