"""Experiment sweeps over market sizes, seeds and mechanisms."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np
import pandas as pd

from src.config import ExperimentConfig, SolverConfig, TopologyConfig, get_config
from src.equilibrium.matching import total_su_utility
from src.errors import EmptyInput
from src.mechanisms.registry import get_mechanism
from src.simulation.topology import generate_topology

logger = logging.getLogger(__name__)

ROW_COLUMNS = [
    "seed", "M", "N", "mechanism", "total_pu_utility", "total_su_utility",
    "matched_pairs", "rounds", "runtime_ms", "status",
]
SUMMARY_COLUMNS = ["M", "N", "mechanism", "mean_pu", "stderr_pu", "mean_su", "stderr_su", "gap"]

STATUS_OK = "ok"
STATUS_NOTE = (
    "status: ok when the mechanism finished, otherwise the exception that stopped the cell; "
    "failed cells carry NaN utilities and are left out of the summary"
)

ProgressCallback = Callable[[int, int, "ExperimentRow"], None]


@dataclass(frozen=True)
class ExperimentRow:
    """Outcome of one mechanism on one random market."""

    seed: int
    M: int
    N: int
    mechanism: str
    total_pu_utility: float
    total_su_utility: float
    matched_pairs: int
    rounds: int
    runtime_ms: float
    status: str = STATUS_OK

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def sort_key(self) -> tuple[int, int, int, str]:
        return (self.M, self.N, self.seed, self.mechanism)


@dataclass(frozen=True)
class SweepCell:
    """One unit of sweep work; picklable for worker processes."""

    seed: int
    M: int
    N: int
    mechanism: str
    epsilon: float


def sweep_cells(exp: ExperimentConfig) -> list[SweepCell]:
    """Every (M, N, seed, mechanism) combination, in canonical order."""
    return [
        SweepCell(seed=seed, M=M, N=N, mechanism=mechanism, epsilon=exp.epsilon)
        for M, N, seed, mechanism in itertools.product(
            exp.m_values, exp.n_values, range(exp.seeds), sorted(exp.mechanisms)
        )
    ]


def run_cell(cell: SweepCell, topo: TopologyConfig, solver: SolverConfig) -> ExperimentRow:
    """
    Generate the cell's market and run its mechanism.

    Never raises for a failing mechanism; the row's ``status`` carries the
    error type instead.
    """
    instance = generate_topology(topo, cell.seed, cell.M, cell.N)
    mechanism = get_mechanism(cell.mechanism, cell.epsilon, solver)
    result = mechanism.execute(instance)

    if not result.success or result.trace is None:
        logger.warning(f"{cell.mechanism} failed on {instance.label}: {result.error}")
        return ExperimentRow(
            seed=cell.seed, M=cell.M, N=cell.N, mechanism=cell.mechanism,
            total_pu_utility=math.nan, total_su_utility=math.nan,
            matched_pairs=0, rounds=int(result.metadata.get("rounds", 0)),
            runtime_ms=result.runtime_ms,
            status=str(result.metadata.get("error_type", "failed")),
        )

    trace = result.trace
    return ExperimentRow(
        seed=cell.seed, M=cell.M, N=cell.N, mechanism=cell.mechanism,
        total_pu_utility=float(sum(trace.pu_utilities.values())),
        total_su_utility=total_su_utility(trace.matching),
        matched_pairs=len(trace.matching.assignment),
        rounds=trace.rounds,
        runtime_ms=result.runtime_ms,
    )


def run_sweep(
        exp: ExperimentConfig,
        topo: TopologyConfig,
        solver: SolverConfig | None = None,
        max_workers: int | None = 1,
        progress_callback: ProgressCallback | None = None,
) -> list[ExperimentRow]:
    """
    Run every sweep cell and return the rows in canonical order.

    Args:
        exp: Market sizes, seeds, mechanisms and epsilon
        topo: Topology generator settings
        solver: Solver settings (global config when None)
        max_workers: Worker processes; 1 runs in this process, None uses every core
        progress_callback: Optional callback(completed, total, row)
    """
    solver = solver if solver is not None else get_config().solver
    cells = sweep_cells(exp)
    logger.info(f"Sweep of {len(cells)} cell(s)")

    if max_workers == 1:
        rows = []
        for i, cell in enumerate(cells, 1):
            row = run_cell(cell, topo, solver)
            rows.append(row)
            if progress_callback:
                progress_callback(i, len(cells), row)
    else:
        # Import here to avoid circular imports
        from src.pipeline.parallel import run_cells_parallel

        rows = run_cells_parallel(cells, topo, solver, max_workers, progress_callback)

    return sorted(rows, key=ExperimentRow.sort_key)


# =============================================================================
# Tables
# =============================================================================

def rows_to_frame(rows: list[ExperimentRow]) -> pd.DataFrame:
    return pd.DataFrame([asdict(row) for row in rows], columns=ROW_COLUMNS)


def frame_to_rows(frame: pd.DataFrame) -> list[ExperimentRow]:
    records: list[dict[str, Any]] = frame[ROW_COLUMNS].to_dict("records")
    return [
        ExperimentRow(
            seed=int(r["seed"]), M=int(r["M"]), N=int(r["N"]), mechanism=str(r["mechanism"]),
            total_pu_utility=float(r["total_pu_utility"]), total_su_utility=float(r["total_su_utility"]),
            matched_pairs=int(r["matched_pairs"]), rounds=int(r["rounds"]),
            runtime_ms=float(r["runtime_ms"]), status=str(r["status"]),
        )
        for r in records
    ]


def write_rows_csv(rows: list[ExperimentRow], path: Path | str) -> Path:
    """Write rows as CSV under a comment line that explains the ``status`` column."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="") as handle:
        handle.write(f"# {STATUS_NOTE}\n")
        rows_to_frame(rows).to_csv(handle, index=False, float_format="%.10g")
    return out


def read_rows_csv(path: Path | str) -> list[ExperimentRow]:
    return frame_to_rows(pd.read_csv(path, comment="#"))


def _stderr(values: pd.Series) -> float:
    if len(values) < 2:
        return 0.0
    return float(values.std(ddof=1) / np.sqrt(len(values)))


def summarize(rows: list[ExperimentRow]) -> pd.DataFrame:
    """
    Per-(M, N, mechanism) means and standard errors of the total utilities.

    ``gap`` is the relative PU loss of the SU-proposing auction against the
    PU-proposing one in the same (M, N) cell,
    ``(mean_pu[g_dac] - mean_pu[g_rdac]) / mean_pu[g_dac]``; it is NaN when
    either mechanism is missing or the g_dac mean is zero. Failed rows are
    left out of the statistics.

    Raises:
        EmptyInput: If there are no successful rows
    """
    frame = rows_to_frame([row for row in rows if row.ok])
    if frame.empty:
        raise EmptyInput("no successful rows to summarize")

    grouped = frame.groupby(["M", "N", "mechanism"], sort=True)
    summary = grouped.agg(
        mean_pu=("total_pu_utility", "mean"),
        stderr_pu=("total_pu_utility", _stderr),
        mean_su=("total_su_utility", "mean"),
        stderr_su=("total_su_utility", _stderr),
    ).reset_index()

    means = summary.pivot_table(index=["M", "N"], columns="mechanism", values="mean_pu")
    gaps: dict[tuple[int, int], float] = {}
    for (M, N), cell in means.iterrows():
        optimal = cell.get("g_dac", math.nan)
        robust = cell.get("g_rdac", math.nan)
        if math.isnan(optimal) or math.isnan(robust) or optimal == 0:
            gaps[(M, N)] = math.nan
        else:
            gaps[(M, N)] = float((optimal - robust) / optimal)

    summary["gap"] = [gaps.get((M, N), math.nan) for M, N in zip(summary["M"], summary["N"])]
    return summary[SUMMARY_COLUMNS]


def write_summary_csv(summary: pd.DataFrame, path: Path | str) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    summary.to_csv(out, index=False, float_format="%.10g")
    return out
