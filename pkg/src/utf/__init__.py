"""Utility transfer functions: full-information and guess-based."""

from src.utf.search import bisect_decreasing, golden_section_max, grid_then_golden
from src.utf.solver import (
    InverseMethod,
    TransferModel,
    UtfModel,
    UtfSolution,
    feasible_time_interval,
    inverse_utf,
    max_reservation,
    reservation_line,
    solve_utf,
    utf_curve,
)
from src.utf.guess import (
    GsCurve,
    GsSolution,
    GuessState,
    GuessUtfModel,
    gs_utf,
    gs_utf_curve,
)

__all__ = [
    "bisect_decreasing",
    "golden_section_max",
    "grid_then_golden",
    "InverseMethod",
    "TransferModel",
    "UtfModel",
    "UtfSolution",
    "feasible_time_interval",
    "inverse_utf",
    "max_reservation",
    "reservation_line",
    "solve_utf",
    "utf_curve",
    "GsCurve",
    "GsSolution",
    "GuessState",
    "GuessUtfModel",
    "gs_utf",
    "gs_utf_curve",
]
