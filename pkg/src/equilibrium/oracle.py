"""Exhaustive reference computations for small markets.

Nothing here is fast; these functions exist to check the mechanisms and
the solvers against independent answers.
"""

from __future__ import annotations

import itertools
import logging
import math

import numpy as np

from src.channel.model import NetworkInstance, pu_utility, su_utility
from src.config import SolverConfig, get_config
from src.equilibrium.bounds import verify_equilibrium
from src.equilibrium.function_set import solve_function_set
from src.equilibrium.matching import Assignment, Matching, build_matching, pu_utility_of
from src.errors import InstanceTooLarge, NoSolution
from src.utf.solver import TransferModel, solve_utf

logger = logging.getLogger(__name__)

MAX_ORACLE_SIDE = 4


def enumerate_assignments(num_pus: int, num_sus: int) -> list[Assignment]:
    """Every partial one-to-one assignment, the empty one included."""
    assignments = []
    for size in range(min(num_pus, num_sus) + 1):
        for pus in itertools.combinations(range(num_pus), size):
            for sus in itertools.permutations(range(num_sus), size):
                assignments.append(Assignment(tuple(zip(pus, sus))))
    return assignments


def _candidate_points(low: np.ndarray, high: np.ndarray, points: int) -> list[np.ndarray]:
    """Diagonal between the two extremes, plus the full box grid for up to two pairs."""
    candidates = [low + s * (high - low) for s in np.linspace(0.0, 1.0, points)]
    if 0 < len(low) <= 2:
        axes = [np.linspace(lo, hi, points) for lo, hi in zip(low, high)]
        candidates.extend(np.array(point) for point in itertools.product(*axes))
    return candidates


def brute_force_equilibria(
        model: TransferModel,
        cfg: SolverConfig | None = None,
) -> list[Matching]:
    """
    Enumerate equilibria of a small market.

    For every assignment, the PU-optimal and SU-optimal equilibria are
    computed from the function set, and further SU utility vectors between
    them are sampled and kept when they verify.

    Raises:
        InstanceTooLarge: If either side has more than four users
    """
    cfg = cfg if cfg is not None else get_config().solver
    instance = model.instance
    if instance.num_pus > MAX_ORACLE_SIDE or instance.num_sus > MAX_ORACLE_SIDE:
        raise InstanceTooLarge(
            f"exhaustive search supports at most {MAX_ORACLE_SIDE} users per side, "
            f"got {instance.num_pus}x{instance.num_sus}"
        )

    found: dict[tuple[object, ...], Matching] = {}

    def keep(matching: Matching) -> None:
        key = (matching.assignment.pairs, tuple(round(d, 9) for d in matching.delta_vector()))
        found.setdefault(key, matching)

    for assignment in enumerate_assignments(instance.num_pus, instance.num_sus):
        if not assignment.pairs:
            empty = Matching(assignment=assignment)
            if verify_equilibrium(model, empty, cfg.equilibrium_tol, cfg.contract_tol).verdict:
                keep(empty)
            continue

        try:
            pu_optimal = solve_function_set(model, assignment, cfg, optimal_for="pu")
        except NoSolution:
            continue
        keep(pu_optimal)

        try:
            su_optimal = solve_function_set(model, assignment, cfg, optimal_for="su")
        except NoSolution:
            su_optimal = pu_optimal
        keep(su_optimal)

        sus = assignment.matched_sus
        low = np.array(pu_optimal.delta_vector())
        high = np.array(su_optimal.delta_vector())
        for point in _candidate_points(low, high, cfg.oracle_grid_points):
            candidate = build_matching(model, assignment, dict(zip(sus, map(float, point))))
            if verify_equilibrium(model, candidate, cfg.equilibrium_tol, cfg.contract_tol).verdict:
                keep(candidate)

    equilibria = sorted(found.values(), key=Matching.sort_key)
    logger.debug(f"Brute force found {len(equilibria)} equilibria")
    return equilibria


def pu_optimal_member(model: TransferModel, equilibria: list[Matching]) -> Matching:
    """Equilibrium with the largest total PU utility (first in canonical order on ties)."""
    return max(equilibria, key=lambda e: sum(pu_utility_of(model, e, m) for m in range(model.instance.num_pus)))


def pu_worst_member(model: TransferModel, equilibria: list[Matching]) -> Matching:
    """Equilibrium with the smallest total PU utility."""
    return min(equilibria, key=lambda e: sum(pu_utility_of(model, e, m) for m in range(model.instance.num_pus)))


# =============================================================================
# Independent checks
# =============================================================================

def grid_oracle_utf(
        instance: NetworkInstance,
        m: int,
        n: int,
        delta: float,
        cfg: SolverConfig | None = None,
        points: int = 2000,
) -> float:
    """Max PU utility subject to SU utility >= ``delta`` over a 2-D (p, t) grid."""
    cfg = cfg if cfg is not None else get_config().solver
    pu, su = instance.pus[m], instance.sus[n]
    p = np.linspace(0.0, cfg.p_max, points)
    best = -math.inf

    for t in np.linspace(0.0, cfg.time_cap(pu.coop_time), points):
        su_values = su_utility(su, m, pu.coop_time, p, t, instance.noise_power, instance.log_base)
        ok = su_values >= delta
        if np.any(ok):
            values = pu_utility(pu, instance.link(m, n), instance.noise_power, p[ok], t, instance.log_base)
            best = max(best, float(np.max(values)))
    return best


def grid_oracle_inverse(
        instance: NetworkInstance,
        m: int,
        n: int,
        pi: float,
        cfg: SolverConfig | None = None,
        points: int = 2000,
) -> float:
    """Max SU utility subject to PU utility >= ``pi`` over a 2-D (p, t) grid."""
    cfg = cfg if cfg is not None else get_config().solver
    pu, su = instance.pus[m], instance.sus[n]
    p = np.linspace(0.0, cfg.p_max, points)
    best = -math.inf

    for t in np.linspace(0.0, cfg.time_cap(pu.coop_time), points):
        pu_values = pu_utility(pu, instance.link(m, n), instance.noise_power, p, t, instance.log_base)
        ok = pu_values >= pi
        if np.any(ok):
            values = su_utility(su, m, pu.coop_time, p[ok], t, instance.noise_power, instance.log_base)
            best = max(best, float(np.max(values)))
    return best


def scan_blocking_pairs(
        instance: NetworkInstance,
        matching: Matching,
        cfg: SolverConfig | None = None,
        tol: float = 1e-4,
) -> list[tuple[int, int]]:
    """
    Pairs (m, n), not matched together, that can both gain more than ``tol``.

    Uses fresh solves only, independent of any transfer model cache.
    """
    cfg = cfg if cfg is not None else get_config().solver

    def current_pu_value(m: int) -> float:
        n = matching.assignment.su_of(m)
        if n is None:
            return 0.0
        return solve_utf(instance, m, n, max(0.0, matching.su_utilities[n]), cfg, strict=False).pu_utility

    blocking = []
    for m in range(instance.num_pus):
        pu_value = current_pu_value(m)
        for n in range(instance.num_sus):
            if matching.assignment.su_of(m) == n:
                continue
            offer = max(0.0, matching.delta(n)) + tol
            solution = solve_utf(instance, m, n, offer, cfg, strict=False)
            if solution.feasible and solution.pu_utility > pu_value + tol:
                blocking.append((m, n))
    return blocking
