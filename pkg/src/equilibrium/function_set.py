"""Fixed-point solver for the extreme equilibria on a given assignment.

On a fixed assignment, SU utilities supporting an equilibrium form a
lattice. Its least element is the best equilibrium for PUs (every SU
sits at its lower bound); its greatest element is the best for SUs
(every SU sits at its upper bound). Both are found by Jacobi iteration
of the respective bound map, which is monotone.

An auction stopped at a coarse step can land on an assignment that
supports no exact equilibrium; ``nearest_equilibrium`` then searches the
assignments one move away.
"""

from __future__ import annotations

import itertools
import logging
import math
from typing import Iterable, Literal

from src.config import SolverConfig, get_config
from src.equilibrium.bounds import lower_bound, upper_bound, verify_equilibrium
from src.equilibrium.matching import Assignment, Matching, build_matching, total_pu_utility, total_su_utility
from src.errors import AssignmentMismatch, NoSolution
from src.utf.solver import TransferModel

logger = logging.getLogger(__name__)

Side = Literal["pu", "su"]


def _iterate(
        model: TransferModel,
        assignment: Assignment,
        start: dict[int, float],
        bound: Side,
        cfg: SolverConfig,
) -> dict[int, float]:
    deltas = dict(start)
    bound_fn = lower_bound if bound == "pu" else upper_bound

    for iteration in range(1, cfg.max_fixed_point_iters + 1):
        current = Matching(assignment=assignment, su_utilities=deltas)
        updated = {n: bound_fn(model, current, n) for n in assignment.matched_sus}

        if any(not math.isfinite(value) for value in updated.values()):
            raise NoSolution(f"bound map left the feasible region on {assignment.pairs}")

        change = max((abs(updated[n] - deltas[n]) for n in updated), default=0.0)
        deltas = updated
        if change < cfg.fixed_point_tol:
            logger.debug(f"Fixed point on {assignment.pairs} after {iteration} iteration(s)")
            return deltas

    raise NoSolution(
        f"no fixed point within {cfg.max_fixed_point_iters} iterations on {assignment.pairs}"
    )


def solve_function_set(
        model: TransferModel,
        assignment: Assignment,
        cfg: SolverConfig | None = None,
        optimal_for: Side = "pu",
) -> Matching:
    """
    Solve for the equilibrium SU utilities on ``assignment``.

    With ``optimal_for="pu"`` the iteration starts from zero and climbs the
    lower-bound map to its least fixed point. With ``optimal_for="su"`` it
    starts from ``g(0)`` of every pair and descends the upper-bound map to
    its greatest fixed point.

    Args:
        model: Transfer model of the instance
        assignment: Injective assignment to support
        cfg: Solver configuration (global config if None)
        optimal_for: Side whose preferred equilibrium is returned

    Returns:
        Verified Matching

    Raises:
        NoSolution: If the iteration does not converge or the result is not an equilibrium
    """
    cfg = cfg if cfg is not None else get_config().solver
    assignment.check_fits(model.instance.num_pus, model.instance.num_sus)

    if optimal_for == "pu":
        start = {n: 0.0 for n in assignment.matched_sus}
    else:
        start = {}
        for m, n in assignment.pairs:
            cap = model.g(m, n, 0.0)
            if cap is None:
                raise NoSolution(f"PU {m} cannot break even with SU {n}")
            start[n] = cap

    deltas = _iterate(model, assignment, start, optimal_for, cfg)
    matching = build_matching(model, assignment, deltas)

    certificate = verify_equilibrium(model, matching, cfg.equilibrium_tol, cfg.contract_tol)
    if not certificate.verdict:
        raise NoSolution(
            f"assignment {assignment.pairs} supports no equilibrium: "
            f"{[str(v) for v in certificate.violations]}"
        )
    return matching


def lattice_merge(model: TransferModel, first: Matching, second: Matching) -> Matching:
    """
    Componentwise minimum of the SU utilities of two equilibria sharing an
    assignment; the result is again an equilibrium.

    Raises:
        AssignmentMismatch: If the two assignments differ
    """
    if first.assignment != second.assignment:
        raise AssignmentMismatch(
            f"cannot merge {first.assignment.pairs} with {second.assignment.pairs}"
        )

    merged = {
        n: min(first.su_utilities[n], second.su_utilities[n])
        for n in first.assignment.matched_sus
    }
    return build_matching(model, first.assignment, merged)


# =============================================================================
# Equilibria near an assignment
# =============================================================================

def neighbouring_assignments(assignment: Assignment, num_pus: int, num_sus: int) -> list[Assignment]:
    """
    Assignments one move away from ``assignment``.

    A move drops a pair, pairs two single users, hands a PU's partner to a
    single PU, gives a PU a single SU, lets a PU take another PU's SU, or
    swaps the partners of two PUs.
    """
    pairs = assignment.as_dict()
    single_pus = [m for m in range(num_pus) if m not in pairs]
    single_sus = [n for n in range(num_sus) if n not in pairs.values()]

    def without(*pus: int) -> dict[int, int]:
        return {m: n for m, n in pairs.items() if m not in pus}

    moves: list[dict[int, int]] = []
    for m in pairs:
        moves.append(without(m))
    for m in single_pus:
        moves.extend({**pairs, m: n} for n in single_sus)
    for m, n in pairs.items():
        moves.extend({**without(m), k: n} for k in single_pus)
        moves.extend({**pairs, m: k} for k in single_sus)
        moves.extend({**without(m, k), m: pairs[k]} for k in pairs if k != m)
    for a, b in itertools.combinations(sorted(pairs), 2):
        moves.append({**pairs, a: pairs[b], b: pairs[a]})

    seen = {assignment}
    neighbours = []
    for move in moves:
        candidate = Assignment.from_mapping(move)
        if candidate not in seen:
            seen.add(candidate)
            neighbours.append(candidate)
    return neighbours


def best_equilibrium(
        model: TransferModel,
        assignments: Iterable[Assignment],
        cfg: SolverConfig | None = None,
        optimal_for: Side = "pu",
) -> Matching:
    """
    Extreme equilibrium of the side ``optimal_for`` over several assignments.

    Every assignment is solved with ``solve_function_set``; among those that
    support an equilibrium, the one with the largest total utility of
    ``optimal_for`` wins (the first one on ties).

    Raises:
        NoSolution: If no assignment supports an equilibrium
    """
    best: Matching | None = None
    best_score = -math.inf
    tried = 0

    for assignment in assignments:
        tried += 1
        try:
            matching = solve_function_set(model, assignment, cfg, optimal_for)
        except NoSolution:
            continue
        score = total_pu_utility(model, matching) if optimal_for == "pu" else total_su_utility(matching)
        if best is None or score > best_score + 1e-12:
            best, best_score = matching, score

    if best is None:
        raise NoSolution(f"none of {tried} assignment(s) supports an equilibrium")
    return best


def nearest_equilibrium(
        model: TransferModel,
        assignment: Assignment,
        cfg: SolverConfig | None = None,
        optimal_for: Side = "pu",
) -> Matching:
    """
    Extreme equilibrium on ``assignment``, or on the best assignment one move
    away when ``assignment`` itself supports none.

    Raises:
        NoSolution: If neither ``assignment`` nor any neighbour supports an equilibrium
    """
    try:
        return solve_function_set(model, assignment, cfg, optimal_for)
    except NoSolution as e:
        logger.debug(f"Searching the neighbours of {assignment.pairs}: {e}")

    instance = model.instance
    return best_equilibrium(
        model, neighbouring_assignments(assignment, instance.num_pus, instance.num_sus), cfg, optimal_for
    )
