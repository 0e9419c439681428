"""Parallel execution of sweep cells."""

from __future__ import annotations

import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Callable

from src.config import LogLevel, SolverConfig, TopologyConfig, get_config, set_config
from src.simulation.sweep import ExperimentRow, SweepCell, run_cell


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


@dataclass
class ParallelExecutionResult:
    """Outcome counts of one sweep, with the rows it produced."""

    total: int
    succeeded: int
    failed: int
    rows: list[ExperimentRow] = field(default_factory=list)
    started_at: datetime = field(default_factory=_utcnow)
    completed_at: datetime = field(default_factory=_utcnow)

    @property
    def success_rate(self) -> float:
        """Percentage of cells whose row has status ok; 0 for an empty sweep."""
        return 100.0 * self.succeeded / self.total if self.total else 0.0


def _run_single_cell(args: tuple[SweepCell, TopologyConfig, SolverConfig, LogLevel]) -> ExperimentRow:
    """
    Worker function to run one sweep cell.

    Runs in a separate process, so it installs its own global configuration
    before touching any mechanism.

    Args:
        args: Tuple of (cell, topology config, solver config, log_level)
    """
    cell, topo, solver, log_level = args
    set_config(replace(get_config(), solver=solver, topology=topo, log_level=log_level))

    return run_cell(cell, topo, solver)


def _failure_row(cell: SweepCell, error: Exception) -> ExperimentRow:
    return ExperimentRow(
        seed=cell.seed, M=cell.M, N=cell.N, mechanism=cell.mechanism,
        total_pu_utility=math.nan, total_su_utility=math.nan,
        matched_pairs=0, rounds=0, runtime_ms=0.0, status=type(error).__name__,
    )


def get_max_workers(requested: int | None = None) -> int:
    """Worker processes for a sweep: the CPU count unless fewer are requested, never below one."""
    cpus = multiprocessing.cpu_count()
    return cpus if requested is None else max(1, min(requested, cpus))


def run_cells_parallel(
        cells: list[SweepCell],
        topo: TopologyConfig,
        solver: SolverConfig,
        max_workers: int | None = None,
        progress_callback: Callable[[int, int, ExperimentRow], None] | None = None,
) -> list[ExperimentRow]:
    """
    Run sweep cells in worker processes.

    Args:
        cells: Cells to run
        topo: Topology settings shipped to every worker
        solver: Solver settings shipped to every worker
        max_workers: Maximum number of parallel workers (None = CPU count)
        progress_callback: Optional callback(completed, total, row) for progress

    Returns:
        One row per cell, in completion order
    """
    if not cells:
        return []

    workers = get_max_workers(max_workers)
    log_level = get_config().log_level
    rows: list[ExperimentRow] = []

    with ProcessPoolExecutor(max_workers=workers) as executor:
        future_to_cell = {
            executor.submit(_run_single_cell, (cell, topo, solver, log_level)): cell
            for cell in cells
        }

        for i, future in enumerate(as_completed(future_to_cell), 1):
            cell = future_to_cell[future]
            try:
                row = future.result()
            except Exception as e:
                row = _failure_row(cell, e)

            rows.append(row)
            if progress_callback:
                progress_callback(i, len(cells), row)

    return rows


def summarize_execution(rows: list[ExperimentRow], started_at: datetime) -> ParallelExecutionResult:
    succeeded = sum(1 for row in rows if row.ok)
    return ParallelExecutionResult(
        total=len(rows),
        succeeded=succeeded,
        failed=len(rows) - succeeded,
        rows=rows,
        started_at=started_at,
    )
