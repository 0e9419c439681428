"""Tests for matchings, bounds, the verifier and the function-set solver."""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np
import pytest

from src.channel import NetworkInstance, ResourceExchange
from src.config import SolverConfig, TopologyConfig
from src.equilibrium import (
    Assignment,
    Matching,
    best_equilibrium,
    brute_force_equilibria,
    build_matching,
    enumerate_assignments,
    lattice_merge,
    lower_bound,
    matching_from_lines,
    matching_to_lines,
    nearest_equilibrium,
    neighbouring_assignments,
    pu_utility_of,
    read_matching,
    scan_blocking_pairs,
    solve_function_set,
    total_pu_utility,
    total_su_utility,
    upper_bound,
    verify_equilibrium,
    write_matching,
)
from src.errors import AssignmentMismatch, NoSolution
from src.mechanisms import g_dac
from src.simulation import generate_topology
from src.utf import UtfModel, reservation_line
from src.validators import ValidationError


@pytest.fixture
def twin_pus(market) -> NetworkInstance:
    """Two identical PUs competing for one SU."""
    return market([-110.0, -110.0], [1.0])


@pytest.fixture
def two_by_two_assignment(two_by_two: NetworkInstance, solver_config: SolverConfig) -> Assignment:
    trace = g_dac(two_by_two, 0.01, solver_config)
    assert trace.certified
    return trace.matching.assignment


class TestAssignment:
    def test_pairs_are_sorted_by_pu(self) -> None:
        assignment = Assignment(((2, 0), (0, 1)))

        assert assignment.pairs == ((0, 1), (2, 0))
        assert assignment.su_of(2) == 0
        assert assignment.pu_of(1) == 0
        assert assignment.su_of(1) is None
        assert assignment.matched_sus == (0, 1)

    @pytest.mark.parametrize("pairs", [((0, 0), (0, 1)), ((0, 0), (1, 0)), ((-1, 0),)])
    def test_rejects_non_injective(self, pairs: tuple[tuple[int, int], ...]) -> None:
        with pytest.raises(ValidationError):
            Assignment(pairs)

    def test_check_fits(self) -> None:
        with pytest.raises(ValidationError):
            Assignment(((0, 3),)).check_fits(2, 2)

    def test_from_mapping(self) -> None:
        assert Assignment.from_mapping({1: 0, 0: 1}).as_dict() == {0: 1, 1: 0}


class TestMatching:
    def test_utilities_must_cover_matched_sus(self) -> None:
        with pytest.raises(ValidationError):
            Matching(assignment=Assignment(((0, 0),)), su_utilities={1: 0.1})

    def test_unmatched_pu_has_zero_utility(self, single_pair: NetworkInstance, solver_config: SolverConfig) -> None:
        model = UtfModel(single_pair, solver_config)
        empty = Matching(assignment=Assignment())

        assert pu_utility_of(model, empty, 0) == 0.0
        assert total_su_utility(empty) == 0.0

    def test_line_round_trip(self, single_pair: NetworkInstance, solver_config: SolverConfig) -> None:
        model = UtfModel(single_pair, solver_config)
        matching = build_matching(model, Assignment(((0, 0),)), {0: 0.25})

        parsed = matching_from_lines(matching_to_lines(matching))

        assert parsed.assignment == matching.assignment
        assert parsed.su_utilities == matching.su_utilities
        assert parsed.exchanges[0] == matching.exchanges[0]

    def test_comments_and_blank_lines_ignored(self) -> None:
        lines = ["# header", "", "m 0 n 1 p 0.5 t 0.2 delta 0.1  # trailing"]

        parsed = matching_from_lines(lines)

        assert parsed.assignment.pairs == ((0, 1),)
        assert parsed.delta(1) == 0.1

    @pytest.mark.parametrize("line", [
        "m 0 n 1 p 0.5 t 0.2",
        "m 0 su 1 p 0.5 t 0.2 delta 0.1",
        "m zero n 1 p 0.5 t 0.2 delta 0.1",
    ])
    def test_malformed_lines(self, line: str) -> None:
        with pytest.raises(ValidationError):
            matching_from_lines([line])

    def test_file_round_trip(self, temp_dir: Path, single_pair: NetworkInstance, solver_config: SolverConfig) -> None:
        model = UtfModel(single_pair, solver_config)
        matching = build_matching(model, Assignment(((0, 0),)), {0: 0.1})

        path = write_matching(matching, temp_dir / "out" / "matching.txt", header="test run")
        text = path.read_text()

        assert text.startswith("# test run\n")
        assert read_matching(path).su_utilities == {0: 0.1}


class TestBounds:
    def test_unmatched_su_has_no_bounds(self, single_pair: NetworkInstance, solver_config: SolverConfig) -> None:
        model = UtfModel(single_pair, solver_config)
        empty = Matching(assignment=Assignment())

        with pytest.raises(ValidationError):
            lower_bound(model, empty, 0)

    def test_competing_pu_sets_the_floor(self, twin_pus: NetworkInstance, solver_config: SolverConfig) -> None:
        model = UtfModel(twin_pus, solver_config)
        matching = Matching(assignment=Assignment(((0, 0),)), su_utilities={0: 0.0})

        assert lower_bound(model, matching, 0) == pytest.approx(model.g(1, 0, 0.0))
        assert upper_bound(model, matching, 0) == pytest.approx(model.g(0, 0, 0.0))


class TestVerifier:
    def test_pu_optimal_sits_on_lower_bounds(
            self, two_by_two_model: UtfModel, two_by_two_assignment: Assignment, solver_config: SolverConfig
    ) -> None:
        matching = solve_function_set(two_by_two_model, two_by_two_assignment, solver_config, "pu")
        certificate = verify_equilibrium(two_by_two_model, matching)

        assert certificate.verdict
        for n in two_by_two_assignment.matched_sus:
            assert matching.delta(n) == pytest.approx(certificate.lower[n], abs=1e-5)

    def test_su_optimal_sits_on_upper_bounds(
            self, two_by_two_model: UtfModel, two_by_two_assignment: Assignment, solver_config: SolverConfig
    ) -> None:
        pu_side = solve_function_set(two_by_two_model, two_by_two_assignment, solver_config, "pu")
        su_side = solve_function_set(two_by_two_model, two_by_two_assignment, solver_config, "su")
        certificate = verify_equilibrium(two_by_two_model, su_side)

        assert certificate.verdict
        for n in two_by_two_assignment.matched_sus:
            assert su_side.delta(n) == pytest.approx(certificate.upper[n], abs=1e-5)
            assert pu_side.delta(n) <= su_side.delta(n) + 1e-9

    def test_twin_pus_bid_up_the_su(self, twin_pus: NetworkInstance, solver_config: SolverConfig) -> None:
        model = UtfModel(twin_pus, solver_config)

        matching = solve_function_set(model, Assignment(((0, 0),)), solver_config, "pu")

        assert matching.delta(0) == pytest.approx(model.g(1, 0, 0.0), abs=1e-6)
        assert model.f(0, 0, matching.delta(0)) == pytest.approx(0.0, abs=1e-6)

    def test_raising_a_utility_past_the_cap_fails(
            self, two_by_two_model: UtfModel, two_by_two_assignment: Assignment, solver_config: SolverConfig
    ) -> None:
        su_side = solve_function_set(two_by_two_model, two_by_two_assignment, solver_config, "su")
        n = two_by_two_assignment.matched_sus[0]
        raised = dict(su_side.su_utilities)
        raised[n] += 0.05

        certificate = verify_equilibrium(two_by_two_model, Matching(two_by_two_assignment, raised))

        assert not certificate.verdict
        assert certificate.conditions() & {"IR", "IC"}

    def test_underpaid_su_is_poached(self, twin_pus: NetworkInstance, solver_config: SolverConfig) -> None:
        model = UtfModel(twin_pus, solver_config)
        matching = Matching(assignment=Assignment(((0, 0),)), su_utilities={0: 0.0})

        certificate = verify_equilibrium(model, matching)

        assert certificate.conditions() == {"CC"}
        assert "PU 1" in certificate.violations[0].actors

    def test_negative_su_utility_is_irrational(self, single_pair: NetworkInstance, solver_config: SolverConfig) -> None:
        model = UtfModel(single_pair, solver_config)
        matching = Matching(assignment=Assignment(((0, 0),)), su_utilities={0: -0.5})

        assert "IR" in verify_equilibrium(model, matching).conditions()

    def test_empty_matching_has_a_blocking_pair(self, single_pair: NetworkInstance, solver_config: SolverConfig) -> None:
        model = UtfModel(single_pair, solver_config)

        certificate = verify_equilibrium(model, Matching(assignment=Assignment()))

        assert certificate.conditions() == {"BlockingPair"}

    def test_recorded_contracts_verify(self, single_pair: NetworkInstance, solver_config: SolverConfig) -> None:
        model = UtfModel(single_pair, solver_config)
        matching = build_matching(model, Assignment(((0, 0),)), {0: 0.0})

        assert verify_equilibrium(model, matching).verdict

    def test_tampered_contract_is_caught(self, single_pair: NetworkInstance, solver_config: SolverConfig) -> None:
        model = UtfModel(single_pair, solver_config)
        tampered = Matching(
            assignment=Assignment(((0, 0),)),
            su_utilities={0: 0.0},
            exchanges={0: ResourceExchange(relay_power=0.0, access_time=10.0)},
        )

        certificate = verify_equilibrium(model, tampered)

        assert not certificate.verdict
        assert "Contract" in certificate.conditions()
        assert any("SU 0" in str(v) and "matching records" in str(v) for v in certificate.violations)

    def test_tampered_contract_read_from_lines(self, single_pair: NetworkInstance,
                                               solver_config: SolverConfig) -> None:
        model = UtfModel(single_pair, solver_config)

        certificate = verify_equilibrium(model, matching_from_lines(["m 0 n 0 p 0 t 10 delta 0"]))

        assert "Contract" in certificate.conditions()

    def test_missing_contract_needs_negative_utility(self, single_pair: NetworkInstance,
                                                    solver_config: SolverConfig) -> None:
        model = UtfModel(single_pair, solver_config)
        missing = Matching(assignment=Assignment(((0, 0),)), su_utilities={0: 0.0}, exchanges={0: None})
        negative = Matching(assignment=Assignment(((0, 0),)), su_utilities={0: -0.5}, exchanges={0: None})

        assert verify_equilibrium(model, missing).conditions() == {"Contract"}
        assert "Contract" not in verify_equilibrium(model, negative).conditions()

    def test_contract_paying_the_pu_less_than_f(self, single_pair: NetworkInstance,
                                               solver_config: SolverConfig) -> None:
        model = UtfModel(single_pair, solver_config)
        exchange = model.exchange(0, 0, 0.0)
        assert exchange is not None
        # same SU utility on a quarter of the optimal access time
        a, b = reservation_line(single_pair, 0, 0, 0.0)
        shorter = 0.25 * exchange.access_time
        wasteful = ResourceExchange(relay_power=a * shorter - b, access_time=shorter)
        matching = Matching(assignment=Assignment(((0, 0),)), su_utilities={0: 0.0}, exchanges={0: wasteful})

        certificate = verify_equilibrium(model, matching)

        assert single_pair.su_utility(0, 0, wasteful) == pytest.approx(0.0, abs=1e-9)
        assert single_pair.pu_utility(0, 0, wasteful) < model.f(0, 0, 0.0) - solver_config.contract_tol
        assert "Contract" in certificate.conditions()

    def test_no_blocking_pairs_by_fresh_solves(
            self, two_by_two: NetworkInstance, two_by_two_model: UtfModel,
            two_by_two_assignment: Assignment, solver_config: SolverConfig,
    ) -> None:
        matching = solve_function_set(two_by_two_model, two_by_two_assignment, solver_config, "pu")

        assert scan_blocking_pairs(two_by_two, matching, solver_config) == []


class TestFunctionSet:
    def test_unprofitable_pair_has_no_solution(self, market, solver_config: SolverConfig) -> None:
        model = UtfModel(market([-110.0], [10.0]), solver_config)

        with pytest.raises(NoSolution):
            solve_function_set(model, Assignment(((0, 0),)), solver_config, "su")

    def test_lattice_merge_is_an_equilibrium(
            self, two_by_two_model: UtfModel, two_by_two_assignment: Assignment, solver_config: SolverConfig
    ) -> None:
        pu_side = solve_function_set(two_by_two_model, two_by_two_assignment, solver_config, "pu")
        su_side = solve_function_set(two_by_two_model, two_by_two_assignment, solver_config, "su")

        merged = lattice_merge(two_by_two_model, pu_side, su_side)

        assert merged.su_utilities == pytest.approx(pu_side.su_utilities)
        assert verify_equilibrium(two_by_two_model, merged).verdict

    def test_lattice_merge_needs_one_assignment(self, two_by_two_model: UtfModel) -> None:
        first = build_matching(two_by_two_model, Assignment(((0, 0),)), {0: 0.0})
        second = build_matching(two_by_two_model, Assignment(((0, 1),)), {1: 0.0})

        with pytest.raises(AssignmentMismatch):
            lattice_merge(two_by_two_model, first, second)

    def test_lattice_merge_of_incomparable_equilibria(self, two_by_two_model: UtfModel,
                                                      solver_config: SolverConfig) -> None:
        by_assignment: dict[Assignment, list[Matching]] = {}
        for matching in brute_force_equilibria(two_by_two_model, solver_config):
            by_assignment.setdefault(matching.assignment, []).append(matching)
        assignment = max(by_assignment, key=lambda a: (len(a), len(by_assignment[a])))
        sus = assignment.matched_sus

        def incomparable(first: Matching, second: Matching) -> bool:
            below = any(first.delta(n) < second.delta(n) - 1e-6 for n in sus)
            above = any(first.delta(n) > second.delta(n) + 1e-6 for n in sus)
            return below and above

        pairs = [p for p in itertools.combinations(by_assignment[assignment], 2) if incomparable(*p)]
        assert pairs
        for first, second in pairs[:10]:
            merged = lattice_merge(two_by_two_model, first, second)

            assert merged.su_utilities != first.su_utilities
            assert merged.su_utilities != second.su_utilities
            for n in sus:
                assert merged.delta(n) == min(first.delta(n), second.delta(n))
            assert verify_equilibrium(two_by_two_model, merged).verdict


class TestNeighbours:
    def test_moves_from_one_pair(self) -> None:
        neighbours = neighbouring_assignments(Assignment(((0, 0),)), 2, 2)

        assert set(neighbours) == {
            Assignment(),
            Assignment(((0, 0), (1, 1))),
            Assignment(((1, 0),)),
            Assignment(((0, 1),)),
        }
        assert len(neighbours) == 4

    def test_moves_from_a_full_assignment(self) -> None:
        start = Assignment(((0, 0), (1, 1)))

        neighbours = neighbouring_assignments(start, 2, 2)

        assert start not in neighbours
        assert Assignment(((0, 1), (1, 0))) in neighbours
        assert Assignment(((0, 0),)) in neighbours
        assert Assignment(((1, 1),)) in neighbours

    def test_taking_another_pus_su(self) -> None:
        neighbours = neighbouring_assignments(Assignment(((0, 0), (1, 1))), 3, 2)

        assert Assignment(((0, 1),)) in neighbours
        assert Assignment(((2, 0), (1, 1))) in neighbours

    def test_empty_market_has_no_moves(self) -> None:
        assert neighbouring_assignments(Assignment(), 0, 3) == []

    def test_empty_assignment_repaired_by_pairing(self, single_pair: NetworkInstance,
                                                   solver_config: SolverConfig) -> None:
        model = UtfModel(single_pair, solver_config)

        matching = nearest_equilibrium(model, Assignment(), solver_config)

        assert matching.assignment.pairs == ((0, 0),)
        assert matching.delta(0) == pytest.approx(0.0, abs=1e-6)

    def test_unprofitable_pair_repaired_by_dropping(self, market, solver_config: SolverConfig) -> None:
        model = UtfModel(market([-110.0], [10.0]), solver_config)

        matching = nearest_equilibrium(model, Assignment(((0, 0),)), solver_config)

        assert matching.assignment == Assignment()

    def test_assignment_with_an_equilibrium_is_kept(self, twin_pus: NetworkInstance,
                                                     solver_config: SolverConfig) -> None:
        model = UtfModel(twin_pus, solver_config)

        matching = nearest_equilibrium(model, Assignment(((1, 0),)), solver_config)

        assert matching.assignment.pairs == ((1, 0),)

    def test_best_equilibrium_prefers_the_richer_side(self, two_by_two: NetworkInstance,
                                                       two_by_two_model: UtfModel,
                                                       solver_config: SolverConfig) -> None:
        assignments = enumerate_assignments(2, 2)
        best = best_equilibrium(two_by_two_model, assignments, solver_config, "pu")

        for assignment in assignments:
            try:
                other = solve_function_set(two_by_two_model, assignment, solver_config, "pu")
            except NoSolution:
                continue
            assert total_pu_utility(two_by_two_model, best) >= total_pu_utility(two_by_two_model, other) - 1e-12

    def test_best_equilibrium_of_nothing(self, two_by_two_model: UtfModel, solver_config: SolverConfig) -> None:
        with pytest.raises(NoSolution):
            best_equilibrium(two_by_two_model, [], solver_config)


@pytest.mark.slow
class TestRandomMarkets:
    def test_function_set_is_the_least_equilibrium(self, fast_solver: SolverConfig) -> None:
        rng = np.random.default_rng(6)
        for seed in range(50):
            M, N = (int(v) for v in rng.integers(1, 4, size=2))
            model = UtfModel(generate_topology(TopologyConfig(), seed=seed, num_pus=M, num_sus=N), fast_solver)
            least: dict[Assignment, Matching] = {}

            for other in brute_force_equilibria(model, fast_solver):
                if not other.assignment.pairs:
                    continue
                if other.assignment not in least:
                    solved = solve_function_set(model, other.assignment, fast_solver, "pu")
                    certificate = verify_equilibrium(model, solved)
                    for n in other.assignment.matched_sus:
                        assert solved.delta(n) == pytest.approx(certificate.lower[n], abs=1e-5), f"seed {seed}"
                    least[other.assignment] = solved
                for n in other.assignment.matched_sus:
                    assert least[other.assignment].delta(n) <= other.delta(n) + 1e-5, f"seed {seed}"

    def test_lattice_closure(self, fast_solver: SolverConfig) -> None:
        rng = np.random.default_rng(8)
        merged_pairs = 0
        seed = 0
        while merged_pairs < 200:
            model = UtfModel(generate_topology(TopologyConfig(), seed=seed, num_pus=2, num_sus=2), fast_solver)
            seed += 1
            by_assignment: dict[Assignment, list[Matching]] = {}
            for matching in brute_force_equilibria(model, fast_solver):
                if matching.assignment.pairs:
                    by_assignment.setdefault(matching.assignment, []).append(matching)

            for members in by_assignment.values():
                if len(members) < 2:
                    continue
                for _ in range(10):
                    i, j = rng.choice(len(members), size=2, replace=False)
                    merged = lattice_merge(model, members[i], members[j])
                    assert verify_equilibrium(model, merged).verdict, f"seed {seed - 1}"
                    merged_pairs += 1
