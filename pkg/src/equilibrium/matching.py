"""Assignments, matchings and their line-oriented file format."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from src.channel.model import ResourceExchange
from src.utf.solver import TransferModel
from src.validators.input_validators import ValidationError, validate_file_path

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Assignment:
    """
    Partial one-to-one correspondence between PU and SU indices.

    ``pairs`` is kept sorted by PU index.
    """

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        pairs = tuple(sorted((int(m), int(n)) for m, n in self.pairs))
        object.__setattr__(self, "pairs", pairs)

        pus = [m for m, _ in pairs]
        sus = [n for _, n in pairs]
        if len(set(pus)) != len(pus):
            raise ValidationError("a PU appears in more than one pair", "assignment")
        if len(set(sus)) != len(sus):
            raise ValidationError("an SU appears in more than one pair", "assignment")
        if any(i < 0 for i in pus + sus):
            raise ValidationError("indices must be nonnegative", "assignment")

    @classmethod
    def from_mapping(cls, pu_to_su: Mapping[int, int]) -> "Assignment":
        return cls(tuple(pu_to_su.items()))

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def su_of(self, m: int) -> int | None:
        for pu, su in self.pairs:
            if pu == m:
                return su
        return None

    def pu_of(self, n: int) -> int | None:
        for pu, su in self.pairs:
            if su == n:
                return pu
        return None

    @property
    def matched_pus(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.pairs)

    @property
    def matched_sus(self) -> tuple[int, ...]:
        return tuple(sorted(n for _, n in self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def check_fits(self, num_pus: int, num_sus: int) -> None:
        """Raise ValidationError if an index is outside an M x N market."""
        for m, n in self.pairs:
            if m >= num_pus or n >= num_sus:
                raise ValidationError(
                    f"pair ({m}, {n}) outside a {num_pus}x{num_sus} market", "assignment"
                )


@dataclass(frozen=True)
class Matching:
    """
    An assignment together with the utility of every matched SU and the
    contract each matched pair signs.
    """

    assignment: Assignment
    su_utilities: Mapping[int, float] = field(default_factory=dict)
    exchanges: Mapping[int, ResourceExchange | None] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "su_utilities", {int(n): float(d) for n, d in self.su_utilities.items()})
        object.__setattr__(self, "exchanges", dict(self.exchanges))
        matched = set(self.assignment.matched_sus)
        if set(self.su_utilities) != matched:
            raise ValidationError(
                "SU utilities must be given for exactly the matched SUs", "su_utilities"
            )

    def delta(self, n: int) -> float:
        """Utility of SU n; 0 when unmatched."""
        return self.su_utilities.get(n, 0.0)

    def delta_vector(self) -> tuple[float, ...]:
        """Matched SU utilities in SU order."""
        return tuple(self.su_utilities[n] for n in self.assignment.matched_sus)

    def with_utilities(self, model: TransferModel, su_utilities: Mapping[int, float]) -> "Matching":
        return build_matching(model, self.assignment, su_utilities)

    def sort_key(self) -> tuple[Any, ...]:
        return (len(self.assignment), self.assignment.pairs, self.delta_vector())


def build_matching(
        model: TransferModel,
        assignment: Assignment,
        su_utilities: Mapping[int, float],
) -> Matching:
    """Attach SU utilities to an assignment and solve every pair's contract."""
    exchanges = {
        n: model.exchange(m, n, su_utilities[n]) if su_utilities[n] >= 0 else None
        for m, n in assignment.pairs
    }
    return Matching(assignment=assignment, su_utilities=dict(su_utilities), exchanges=exchanges)


def pu_utility_of(model: TransferModel, matching: Matching, m: int) -> float:
    """f at the SU's utility for a matched PU, zero for an unmatched one."""
    n = matching.assignment.su_of(m)
    if n is None:
        return 0.0
    return model.f(m, n, matching.su_utilities[n])


def total_pu_utility(model: TransferModel, matching: Matching) -> float:
    return sum(pu_utility_of(model, matching, m) for m in matching.assignment.matched_pus)


def total_su_utility(matching: Matching) -> float:
    return sum(matching.su_utilities.values())


# =============================================================================
# Line-oriented serialization
# =============================================================================

def matching_to_lines(matching: Matching) -> list[str]:
    """One ``m <i> n <j> p <float> t <float> delta <float>`` line per matched pair."""
    lines = []
    for m, n in matching.assignment.pairs:
        exchange = matching.exchanges.get(n)
        p = exchange.relay_power if exchange else math.nan
        t = exchange.access_time if exchange else math.nan
        lines.append(f"m {m} n {n} p {p!r} t {t!r} delta {matching.su_utilities[n]!r}")
    return lines


def matching_from_lines(lines: Iterable[str]) -> Matching:
    """
    Parse matching lines. Blank lines and ``#`` comments are ignored.

    Raises:
        ValidationError: On a malformed line or a non-injective assignment
    """
    pairs: list[tuple[int, int]] = []
    deltas: dict[int, float] = {}
    exchanges: dict[int, ResourceExchange | None] = {}

    for number, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        tokens = line.split()
        if len(tokens) != 10 or tokens[0::2] != ["m", "n", "p", "t", "delta"]:
            raise ValidationError(f"malformed line {number}: {raw.strip()!r}", "matching")
        try:
            m, n = int(tokens[1]), int(tokens[3])
            p, t, delta = float(tokens[5]), float(tokens[7]), float(tokens[9])
        except ValueError as e:
            raise ValidationError(f"malformed number on line {number}", "matching") from e

        pairs.append((m, n))
        deltas[n] = delta
        exchanges[n] = (
            ResourceExchange(relay_power=p, access_time=t)
            if math.isfinite(p) and math.isfinite(t) and p >= 0 and t >= 0
            else None
        )

    return Matching(assignment=Assignment(tuple(pairs)), su_utilities=deltas, exchanges=exchanges)


def write_matching(matching: Matching, path: Path | str, header: str | None = None) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {line}" for line in header.splitlines()] if header else []
    lines += matching_to_lines(matching)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out


def read_matching(path: Any) -> Matching:
    """Read a matching file written by ``write_matching``."""
    file_path = validate_file_path(path, must_exist=True, field="matching")
    matching = matching_from_lines(file_path.read_text(encoding="utf-8").splitlines())
    logger.debug(f"Read matching with {len(matching.assignment)} pair(s) from {file_path}")
    return matching
