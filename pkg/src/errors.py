"""Domain errors raised by the market simulator."""

from __future__ import annotations


class MarketError(Exception):
    """Base class for failures of market computations."""

    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(message)


class InfeasibleReservation(MarketError):
    """The pair cannot guarantee the requested SU utility at all."""


class TargetUnreachable(MarketError):
    """The requested PU utility lies above f(0) for the pair."""


class DegenerateCurve(MarketError):
    """A guess-based transfer curve has fewer than two usable samples."""


class AssignmentMismatch(MarketError):
    """Two matchings that must share an assignment do not."""


class NoSolution(MarketError):
    """The equilibrium function set has no solution for an assignment."""


class InstanceTooLarge(MarketError):
    """The instance exceeds what exhaustive enumeration supports."""


class IterationCapExceeded(MarketError):
    """A mechanism did not terminate within its round cap."""

    def __init__(self, message: str, rounds: int) -> None:
        self.rounds = rounds
        super().__init__(message)


class EmptyInput(MarketError):
    """An aggregation was asked to summarize nothing."""
