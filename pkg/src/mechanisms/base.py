"""Base class and result types for all market mechanisms."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, ClassVar, Literal

from src.channel.model import FloatArray, NetworkInstance
from src.config import SolverConfig, get_config
from src.equilibrium.matching import Matching
from src.utf.guess import GuessState
from src.validators.input_validators import ValidationError, validate_positive

logger = logging.getLogger(__name__)

Action = Literal["propose", "hold", "reject", "abstain"]

TRACE_HEADER = "round,actor,action,target,value"


def _now() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class MechanismEvent:
    """One step of an auction, as written to a trace log."""

    round: int
    actor: str
    action: Action
    target: str
    value: float

    def to_line(self) -> str:
        return f"{self.round},{self.actor},{self.action},{self.target},{self.value!r}"


@dataclass
class OfferBook:
    """
    Standing offers of every proposer to every receiver.

    ``offers[i, j]`` is the utility proposer i currently offers receiver j.
    """

    proposers: Literal["pu", "su"]
    offers: FloatArray


@dataclass
class MechanismTrace:
    """Everything a mechanism run produced."""

    mechanism: str
    rounds: int
    matching: Matching
    converged: bool = True
    raw_matching: Matching | None = None
    certified: bool = False
    pu_utilities: dict[int, float] = field(default_factory=dict)
    events: list[MechanismEvent] = field(default_factory=list)
    offers: OfferBook | None = None
    guesses: GuessState | None = None
    epsilon: float | None = None  # offer step of the final auction run

    def trace_lines(self) -> list[str]:
        return [TRACE_HEADER] + [event.to_line() for event in self.events]

    def write_trace(self, path: Path | str) -> Path:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text("\n".join(self.trace_lines()) + "\n", encoding="utf-8")
        return out


@dataclass
class MechanismResult:
    """Result wrapper for mechanism execution."""

    success: bool
    trace: MechanismTrace | None = None
    error: str | None = None
    started_at: datetime = field(default_factory=_now)
    completed_at: datetime | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.completed_at is None:
            self.completed_at = _now()

    @property
    def runtime_ms(self) -> float:
        assert self.completed_at is not None
        return (self.completed_at - self.started_at).total_seconds() * 1000.0


class BaseMechanism(ABC):
    """
    Abstract base class for all mechanisms.

    Each mechanism implements ``run``, which computes a matching for one
    instance; ``execute`` wraps it with validation and error capture.
    """

    name: ClassVar[str] = "mechanism"

    def __init__(self, epsilon: float = 0.01, cfg: SolverConfig | None = None) -> None:
        self.epsilon = validate_positive(epsilon, "epsilon")
        self.cfg = cfg if cfg is not None else get_config().solver

    @property
    def mechanism_name(self) -> str:
        """Get the name of this mechanism."""
        return self.name

    def validate_input(self, input_data: Any) -> NetworkInstance:
        """
        Validate the instance handed to the mechanism.

        Raises:
            ValidationError: If input is not a NetworkInstance
        """
        if not isinstance(input_data, NetworkInstance):
            raise ValidationError(
                f"expected a NetworkInstance, got {type(input_data).__name__}",
                "instance",
            )
        return input_data

    @abstractmethod
    def run(self, instance: NetworkInstance) -> MechanismTrace:
        """
        Compute a matching.

        Args:
            instance: Validated market instance

        Returns:
            The run's trace, final matching included
        """
        ...

    def execute(self, raw_input: Any) -> MechanismResult:
        """
        Run the mechanism with validation and error handling.

        Args:
            raw_input: Market instance

        Returns:
            MechanismResult containing the trace or error information
        """
        started_at = _now()

        try:
            instance = self.validate_input(raw_input)
            trace = self.run(instance)
            return MechanismResult(
                success=trace.converged,
                trace=trace,
                started_at=started_at,
                metadata={"mechanism": self.mechanism_name, "rounds": trace.rounds},
            )
        except Exception as e:
            logger.debug(f"{self.mechanism_name} failed: {e}")
            return MechanismResult(
                success=False,
                error=str(e),
                started_at=started_at,
                metadata={"mechanism": self.mechanism_name, "error_type": type(e).__name__},
            )
