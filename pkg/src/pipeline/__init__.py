"""Pipeline module with Prefect flows and parallel execution."""

from src.pipeline.flows import (
    SweepOutcome,
    equilibrium_sweep,
)
from src.pipeline.parallel import (
    ParallelExecutionResult,
    get_max_workers,
    run_cells_parallel,
    summarize_execution,
)

__all__ = [
    "SweepOutcome",
    "equilibrium_sweep",
    "ParallelExecutionResult",
    "get_max_workers",
    "run_cells_parallel",
    "summarize_execution",
]
