"""Matchings, equilibrium certificates and reference solvers."""

from src.equilibrium.matching import (
    Assignment,
    Matching,
    build_matching,
    matching_from_lines,
    matching_to_lines,
    pu_utility_of,
    read_matching,
    total_pu_utility,
    total_su_utility,
    write_matching,
)
from src.equilibrium.bounds import (
    EquilibriumCertificate,
    Violation,
    lower_bound,
    upper_bound,
    verify_equilibrium,
)
from src.equilibrium.function_set import (
    best_equilibrium,
    lattice_merge,
    nearest_equilibrium,
    neighbouring_assignments,
    solve_function_set,
)
from src.equilibrium.oracle import (
    brute_force_equilibria,
    enumerate_assignments,
    grid_oracle_inverse,
    grid_oracle_utf,
    pu_optimal_member,
    pu_worst_member,
    scan_blocking_pairs,
)

__all__ = [
    "Assignment",
    "Matching",
    "build_matching",
    "matching_from_lines",
    "matching_to_lines",
    "pu_utility_of",
    "read_matching",
    "total_pu_utility",
    "total_su_utility",
    "write_matching",
    "EquilibriumCertificate",
    "Violation",
    "lower_bound",
    "upper_bound",
    "verify_equilibrium",
    "best_equilibrium",
    "lattice_merge",
    "nearest_equilibrium",
    "neighbouring_assignments",
    "solve_function_set",
    "brute_force_equilibria",
    "enumerate_assignments",
    "grid_oracle_inverse",
    "grid_oracle_utf",
    "pu_optimal_member",
    "pu_worst_member",
    "scan_blocking_pairs",
]
