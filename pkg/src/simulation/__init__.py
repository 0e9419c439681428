"""Random topologies and experiment sweeps."""

from src.simulation.topology import (
    generate_topology,
    one_pu_two_su_fixture,
    pathloss_db,
    two_pu_one_su_fixture,
)
from src.simulation.sweep import (
    ROW_COLUMNS,
    SUMMARY_COLUMNS,
    ExperimentRow,
    SweepCell,
    read_rows_csv,
    rows_to_frame,
    run_cell,
    run_sweep,
    summarize,
    sweep_cells,
    write_rows_csv,
    write_summary_csv,
)

__all__ = [
    "generate_topology",
    "one_pu_two_su_fixture",
    "pathloss_db",
    "two_pu_one_su_fixture",
    "ROW_COLUMNS",
    "SUMMARY_COLUMNS",
    "ExperimentRow",
    "SweepCell",
    "read_rows_csv",
    "rows_to_frame",
    "run_cell",
    "run_sweep",
    "summarize",
    "sweep_cells",
    "write_rows_csv",
    "write_summary_csv",
]
