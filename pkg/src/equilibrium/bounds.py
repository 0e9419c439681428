"""Equilibrium bounds on SU utilities and the equilibrium verifier.

For a matched SU n with partner PU ``mu(n)``:

* IR: PU ``mu(n)`` must not prefer staying single, so ``delta_n <= g(0)``.
* IC: PU ``mu(n)`` must not prefer another SU k at k's current utility.
* CC: no other PU may out-bid ``mu(n)`` for SU n while keeping what it has.

IR and IC cap ``delta_n`` from above, CC bounds it from below.

A recorded contract must also deliver what the matching claims: SU n
gets ``delta_n`` from it and PU ``mu(n)`` no less than ``f(delta_n)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal

from src.config import get_config
from src.equilibrium.matching import Matching, pu_utility_of
from src.utf.solver import TransferModel
from src.validators.input_validators import ValidationError

logger = logging.getLogger(__name__)

Condition = Literal["IR", "IC", "CC", "BlockingPair", "Contract"]


@dataclass(frozen=True)
class Violation:
    """One failed equilibrium condition and the users involved."""

    condition: Condition
    actors: tuple[str, ...]
    detail: str = ""

    def __str__(self) -> str:
        actors = ", ".join(self.actors)
        return f"{self.condition} [{actors}] {self.detail}".rstrip()


@dataclass
class EquilibriumCertificate:
    """Bounds of every matched SU and the conditions that fail."""

    lower: dict[int, float] = field(default_factory=dict)
    upper: dict[int, float] = field(default_factory=dict)
    violations: list[Violation] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return not self.violations

    def conditions(self) -> set[Condition]:
        return {v.condition for v in self.violations}


def _require_matched(matching: Matching, n: int) -> int:
    m = matching.assignment.pu_of(n)
    if m is None:
        raise ValidationError(f"SU {n} is unmatched", "n")
    return m


def _contract_violations(
        model: TransferModel, matching: Matching, m: int, n: int, tol: float
) -> list[Violation]:
    """Mismatches between the recorded contract of pair (m, n) and the utilities it should pay."""
    if n not in matching.exchanges:
        return []

    delta = matching.su_utilities[n]
    exchange = matching.exchanges[n]
    pair = (f"PU {m}", f"SU {n}")
    if exchange is None:
        if delta < 0:
            return []
        return [Violation("Contract", pair, f"no contract recorded for SU utility {delta:.6g}")]

    violations = []
    su_gets = model.instance.su_utility(m, n, exchange)
    pu_gets = model.instance.pu_utility(m, n, exchange)
    if abs(su_gets - delta) > tol:
        violations.append(Violation(
            "Contract", pair, f"contract pays SU {n} {su_gets:.6g}, matching records {delta:.6g}",
        ))
    if pu_gets < -tol:
        violations.append(Violation("IR", pair, f"contract leaves PU {m} {pu_gets:.6g}"))
    promised = model.f(m, n, delta)
    if pu_gets < promised - tol:
        violations.append(Violation(
            "Contract", pair, f"contract pays PU {m} {pu_gets:.6g} < f = {promised:.6g}",
        ))
    return violations


def _competitor_terms(model: TransferModel, matching: Matching, n: int) -> list[tuple[int, float]]:
    """``(m, g_n^m(current utility of m))`` for every PU m other than SU n's partner."""
    partner = matching.assignment.pu_of(n)
    terms = []
    for m in range(model.instance.num_pus):
        if m == partner:
            continue
        value = model.g(m, n, pu_utility_of(model, matching, m))
        if value is not None:
            terms.append((m, value))
    return terms


def _rival_terms(model: TransferModel, matching: Matching, n: int) -> list[tuple[int, float]]:
    """``(k, g_n^mu(f_k^mu(delta_k)))`` for every SU k other than n."""
    partner = _require_matched(matching, n)
    terms = []
    for k in range(model.instance.num_sus):
        if k == n:
            continue
        rival_value = model.f(partner, k, matching.delta(k))
        if rival_value == -math.inf:
            continue
        value = model.g(partner, n, rival_value)
        terms.append((k, -math.inf if value is None else value))
    return terms


def lower_bound(model: TransferModel, matching: Matching, n: int) -> float:
    """Lowest utility SU n accepts: what a competing PU could offer, floored at 0."""
    _require_matched(matching, n)
    return max([0.0] + [value for _, value in _competitor_terms(model, matching, n)])


def upper_bound(model: TransferModel, matching: Matching, n: int) -> float:
    """
    Highest utility SU n can hold before its partner walks away or switches.

    ``-inf`` when the partner cannot even break even with SU n.
    """
    partner = _require_matched(matching, n)
    cap = model.g(partner, n, 0.0)
    if cap is None:
        return -math.inf
    return min([cap] + [value for _, value in _rival_terms(model, matching, n)])


def verify_equilibrium(
        model: TransferModel,
        matching: Matching,
        tol: float | None = None,
        contract_tol: float | None = None,
) -> EquilibriumCertificate:
    """
    Check that ``matching`` is a market equilibrium.

    Matched SUs are checked against their bounds; unmatched PU and SU pairs
    are scanned for a contract that strictly benefits both.
    Recorded contracts are re-evaluated: a pair without a recorded
    contract is not checked, and a missing contract is allowed only where
    the SU utility is negative.

    Args:
        model: Transfer model of the instance
        matching: Matching to check
        tol: Utility tolerance (solver ``equilibrium_tol`` if None)
        contract_tol: Tolerance on the utilities a contract pays (solver ``contract_tol`` if None)

    Returns:
        EquilibriumCertificate; ``verdict`` is True iff no condition fails
    """
    solver = get_config().solver
    tol = tol if tol is not None else solver.equilibrium_tol
    contract_tol = contract_tol if contract_tol is not None else solver.contract_tol
    instance = model.instance
    matching.assignment.check_fits(instance.num_pus, instance.num_sus)
    certificate = EquilibriumCertificate()

    for m, n in matching.assignment.pairs:
        delta = matching.su_utilities[n]
        su, pu = f"SU {n}", f"PU {m}"

        if delta < -tol:
            certificate.violations.append(
                Violation("IR", (su,), f"SU utility {delta:.6g} is negative")
            )

        cap = model.g(m, n, 0.0)
        if cap is None or delta > cap + tol:
            certificate.violations.append(Violation(
                "IR", (pu, su),
                f"PU utility {model.f(m, n, delta):.6g} is negative",
            ))

        upper = -math.inf if cap is None else cap
        for k, value in _rival_terms(model, matching, n):
            upper = min(upper, value)
            if delta > value + tol:
                certificate.violations.append(Violation(
                    "IC", (pu, f"SU {k}"),
                    f"PU {m} prefers SU {k}: SU {n} holds {delta:.6g} > {value:.6g}",
                ))

        lower = 0.0
        for rival, value in _competitor_terms(model, matching, n):
            lower = max(lower, value)
            if delta < value - tol:
                certificate.violations.append(Violation(
                    "CC", (f"PU {rival}", su),
                    f"PU {rival} can offer SU {n} {value:.6g} > {delta:.6g}",
                ))

        certificate.violations.extend(_contract_violations(model, matching, m, n, contract_tol))
        certificate.lower[n] = lower
        certificate.upper[n] = upper

    matched_pus = set(matching.assignment.matched_pus)
    matched_sus = set(matching.assignment.matched_sus)
    for m in range(instance.num_pus):
        if m in matched_pus:
            continue
        for n in range(instance.num_sus):
            if n in matched_sus:
                continue
            gain = model.g(m, n, tol)
            if gain is not None and gain > tol:
                certificate.violations.append(Violation(
                    "BlockingPair", (f"PU {m}", f"SU {n}"),
                    f"both unmatched, SU can get {gain:.6g} while PU keeps {tol:.1g}",
                ))

    if certificate.violations:
        logger.debug(f"Matching fails verification: {[str(v) for v in certificate.violations]}")

    return certificate
