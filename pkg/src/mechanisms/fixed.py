"""Deferred acceptance on fixed preference lists.

In the simplified market every PU offers a fixed access time and every SU
a fixed relay power, so each side simply ranks the other; utilities are
no longer transferable and the classical deferred acceptance applies.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Literal, Mapping, Sequence

from src.channel.model import NetworkInstance, ResourceExchange
from src.equilibrium.matching import Assignment
from src.errors import InstanceTooLarge
from src.validators.input_validators import ValidationError

logger = logging.getLogger(__name__)

Prefs = tuple[tuple[int, ...], ...]


def _check_lists(lists: Prefs, other_side: int, field: str) -> None:
    for i, ranking in enumerate(lists):
        if len(set(ranking)) != len(ranking):
            raise ValidationError(f"list {i} repeats an entry", field)
        if any(not 0 <= j < other_side for j in ranking):
            raise ValidationError(f"list {i} names an index outside [0, {other_side})", field)


@dataclass(frozen=True)
class PreferenceLists:
    """
    Strict, possibly truncated, preference lists of both sides.

    ``pu_prefs[m]`` ranks the SUs acceptable to PU m, best first;
    ``su_prefs[n]`` ranks the PUs acceptable to SU n.
    """

    pu_prefs: Prefs
    su_prefs: Prefs

    def __post_init__(self) -> None:
        object.__setattr__(self, "pu_prefs", tuple(tuple(p) for p in self.pu_prefs))
        object.__setattr__(self, "su_prefs", tuple(tuple(q) for q in self.su_prefs))
        _check_lists(self.pu_prefs, self.num_sus, "pu_prefs")
        _check_lists(self.su_prefs, self.num_pus, "su_prefs")

    @property
    def num_pus(self) -> int:
        return len(self.pu_prefs)

    @property
    def num_sus(self) -> int:
        return len(self.su_prefs)

    @classmethod
    def from_fixed_exchanges(
            cls,
            instance: NetworkInstance,
            access_times: Sequence[float],
            relay_powers: Sequence[float],
    ) -> "PreferenceLists":
        """
        Rank partners under fixed contracts: PU m always offers
        ``access_times[m]``, SU n always relays with ``relay_powers[n]``.

        Partners giving negative utility are left off the list; ties go to
        the lower index.
        """
        M, N = instance.num_pus, instance.num_sus
        if len(access_times) != M or len(relay_powers) != N:
            raise ValidationError("one access time per PU and one relay power per SU required", "exchanges")

        def contract(m: int, n: int) -> ResourceExchange:
            return ResourceExchange(relay_power=relay_powers[n], access_time=access_times[m])

        pu_prefs = []
        for m in range(M):
            values = {n: instance.pu_utility(m, n, contract(m, n)) for n in range(N)}
            ranked = sorted((n for n in values if values[n] >= 0), key=lambda n: (-values[n], n))
            pu_prefs.append(tuple(ranked))

        su_prefs = []
        for n in range(N):
            values = {m: instance.su_utility(m, n, contract(m, n)) for m in range(M)}
            ranked = sorted((m for m in values if values[m] >= 0), key=lambda m: (-values[m], m))
            su_prefs.append(tuple(ranked))

        return cls(pu_prefs=tuple(pu_prefs), su_prefs=tuple(su_prefs))

    def rank(self, side: Literal["pu", "su"], i: int, j: int) -> int | None:
        """Position of j in i's list, None if j is unacceptable to i."""
        ranking = self.pu_prefs[i] if side == "pu" else self.su_prefs[i]
        return ranking.index(j) if j in ranking else None


@dataclass(frozen=True)
class SuReportStrategy:
    """How an SU reports its list: truthfully, truncated to a set, or reordered."""

    mode: Literal["truthful", "truncate", "permute"] = "truthful"
    pus: tuple[int, ...] = ()

    def apply(self, true_list: tuple[int, ...]) -> tuple[int, ...]:
        """
        Reported list derived from ``true_list``.

        Raises:
            ValidationError: If a permutation is not a reordering of the true list
        """
        if self.mode == "truthful":
            return true_list
        if self.mode == "truncate":
            keep = set(self.pus)
            return tuple(m for m in true_list if m in keep)
        if sorted(self.pus) != sorted(true_list):
            raise ValidationError("a permutation must reorder the true list", "pus")
        return tuple(self.pus)


def deferred_acceptance(proposer_prefs: Prefs, receiver_prefs: Prefs) -> dict[int, int]:
    """
    Proposer-optimal stable matching of two sides with strict lists.

    Returns:
        Mapping proposer -> receiver for every matched proposer
    """
    next_choice = [0] * len(proposer_prefs)
    held: dict[int, int] = {}  # receiver -> proposer
    free = list(range(len(proposer_prefs)))

    while free:
        rejected: list[int] = []
        applications: dict[int, list[int]] = {}
        for i in free:
            ranking = proposer_prefs[i]
            if next_choice[i] < len(ranking):
                applications.setdefault(ranking[next_choice[i]], []).append(i)

        for j, applicants in applications.items():
            ranking = receiver_prefs[j]
            incumbent = held.get(j)
            candidates = applicants + ([incumbent] if incumbent is not None else [])
            acceptable = [i for i in candidates if i in ranking]
            if acceptable:
                held[j] = min(acceptable, key=ranking.index)
            rejected.extend(i for i in candidates if i != held.get(j))

        for i in rejected:
            next_choice[i] += 1
        free = [i for i in rejected if next_choice[i] < len(proposer_prefs[i])]

    return {i: j for j, i in held.items()}


def dac_fixed(prefs: PreferenceLists) -> Assignment:
    """PU-proposing deferred acceptance; PU-optimal stable assignment."""
    return Assignment.from_mapping(deferred_acceptance(prefs.pu_prefs, prefs.su_prefs))


def rdac_fixed(prefs: PreferenceLists) -> Assignment:
    """SU-proposing deferred acceptance; SU-optimal stable assignment."""
    su_to_pu = deferred_acceptance(prefs.su_prefs, prefs.pu_prefs)
    return Assignment(tuple((m, n) for n, m in su_to_pu.items()))


def dac_with_reports(prefs: PreferenceLists, strategies: Mapping[int, SuReportStrategy]) -> Assignment:
    """PU-proposing deferred acceptance on true PU lists and reported SU lists."""
    reported = tuple(
        strategies[n].apply(q) if n in strategies else q
        for n, q in enumerate(prefs.su_prefs)
    )
    return dac_fixed(PreferenceLists(pu_prefs=prefs.pu_prefs, su_prefs=reported))


def blocking_pairs_fixed(prefs: PreferenceLists, assignment: Assignment) -> list[tuple[int, int]]:
    """Mutually acceptable pairs that both prefer each other to their partners."""
    blocking = []
    for m, ranking in enumerate(prefs.pu_prefs):
        current_n = assignment.su_of(m)
        for n in ranking:
            if n == current_n:
                break
            m_rank = prefs.rank("su", n, m)
            if m_rank is None:
                continue
            current_m = assignment.pu_of(n)
            current_rank = None if current_m is None else prefs.rank("su", n, current_m)
            if current_rank is None or m_rank < current_rank:
                blocking.append((m, n))
    return blocking


def is_stable(prefs: PreferenceLists, assignment: Assignment) -> bool:
    acceptable = all(
        prefs.rank("pu", m, n) is not None and prefs.rank("su", n, m) is not None
        for m, n in assignment.pairs
    )
    return acceptable and not blocking_pairs_fixed(prefs, assignment)


def enumerate_stable_assignments(prefs: PreferenceLists) -> list[Assignment]:
    """
    Every stable assignment, by exhaustive search.

    Raises:
        InstanceTooLarge: With more than four users on a side
    """
    if prefs.num_pus > 4 or prefs.num_sus > 4:
        raise InstanceTooLarge("stable assignments are enumerated for at most 4 users per side")

    stable = []
    for size in range(min(prefs.num_pus, prefs.num_sus) + 1):
        for pus in itertools.combinations(range(prefs.num_pus), size):
            for sus in itertools.permutations(range(prefs.num_sus), size):
                assignment = Assignment(tuple(zip(pus, sus)))
                if is_stable(prefs, assignment):
                    stable.append(assignment)
    return stable


# =============================================================================
# Worked example: three PUs and three SUs with cyclic preferences
# =============================================================================

def example_one_preferences() -> PreferenceLists:
    """Cyclic lists with exactly three stable assignments."""
    return PreferenceLists(
        pu_prefs=((0, 1, 2), (1, 2, 0), (2, 0, 1)),
        su_prefs=((1, 2, 0), (2, 0, 1), (0, 1, 2)),
    )


EXAMPLE_ONE_PU_OPTIMAL = Assignment(((0, 0), (1, 1), (2, 2)))
EXAMPLE_ONE_INTERMEDIATE = Assignment(((0, 1), (1, 2), (2, 0)))
EXAMPLE_ONE_SU_OPTIMAL = Assignment(((0, 2), (1, 0), (2, 1)))
