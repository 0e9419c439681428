"""Tests for experiment sweeps and their summaries."""

from __future__ import annotations

import math
from dataclasses import replace
from pathlib import Path

import pandas as pd
import pytest
from scipy import stats

from src.config import ExperimentConfig, SolverConfig, TopologyConfig
from src.errors import EmptyInput
from src.simulation import (
    ROW_COLUMNS,
    SUMMARY_COLUMNS,
    ExperimentRow,
    SweepCell,
    read_rows_csv,
    run_cell,
    run_sweep,
    summarize,
    sweep_cells,
    write_rows_csv,
    write_summary_csv,
)


@pytest.fixture
def small_experiment(temp_dir: Path) -> ExperimentConfig:
    return ExperimentConfig(
        m_values=(2,),
        n_values=(0, 2),
        seeds=2,
        mechanisms=("g_rdac", "g_dac"),
        epsilon=0.02,
        output_directory=temp_dir,
    )


def make_row(mechanism: str, pu: float, seed: int = 0, N: int = 2, status: str = "ok") -> ExperimentRow:
    return ExperimentRow(
        seed=seed, M=2, N=N, mechanism=mechanism,
        total_pu_utility=pu, total_su_utility=0.1,
        matched_pairs=2, rounds=5, runtime_ms=1.0, status=status,
    )


class TestCells:
    def test_canonical_order(self, small_experiment: ExperimentConfig) -> None:
        cells = sweep_cells(small_experiment)

        assert len(cells) == 1 * 2 * 2 * 2
        assert cells[0] == SweepCell(seed=0, M=2, N=0, mechanism="g_dac", epsilon=0.02)
        assert [c.mechanism for c in cells[:2]] == ["g_dac", "g_rdac"]

    def test_empty_su_side_gives_zero_rows(self, fast_solver: SolverConfig) -> None:
        row = run_cell(SweepCell(seed=0, M=2, N=0, mechanism="g_dac", epsilon=0.02), TopologyConfig(), fast_solver)

        assert row.ok
        assert row.total_pu_utility == 0.0
        assert row.total_su_utility == 0.0
        assert row.matched_pairs == 0

    def test_failure_becomes_a_status(self, fast_solver: SolverConfig) -> None:
        cell = SweepCell(seed=0, M=5, N=5, mechanism="brute_force", epsilon=0.02)

        row = run_cell(cell, TopologyConfig(), fast_solver)

        assert row.status == "InstanceTooLarge"
        assert not row.ok
        assert math.isnan(row.total_pu_utility)


class TestRunSweep:
    def test_rows(self, small_experiment: ExperimentConfig, fast_solver: SolverConfig) -> None:
        seen: list[int] = []
        rows = run_sweep(small_experiment, TopologyConfig(), fast_solver,
                         progress_callback=lambda done, total, row: seen.append(done))

        assert len(rows) == 8
        assert seen == list(range(1, 9))
        assert all(row.ok for row in rows)
        assert rows == sorted(rows, key=ExperimentRow.sort_key)

    def test_deterministic_apart_from_timing(self, small_experiment: ExperimentConfig,
                                             fast_solver: SolverConfig) -> None:
        first = run_sweep(small_experiment, TopologyConfig(), fast_solver)
        second = run_sweep(small_experiment, TopologyConfig(), fast_solver)

        assert [replace(r, runtime_ms=0.0) for r in first] == [replace(r, runtime_ms=0.0) for r in second]


class TestSummaries:
    def test_columns_and_statistics(self) -> None:
        rows = [make_row("g_dac", 1.0, 0), make_row("g_dac", 3.0, 1), make_row("g_rdac", 0.5)]

        summary = summarize(rows)

        assert list(summary.columns) == SUMMARY_COLUMNS
        dac = summary[summary["mechanism"] == "g_dac"].iloc[0]
        rdac = summary[summary["mechanism"] == "g_rdac"].iloc[0]
        assert dac["mean_pu"] == pytest.approx(2.0)
        assert dac["stderr_pu"] == pytest.approx(1.0)
        assert rdac["stderr_pu"] == 0.0
        assert dac["gap"] == pytest.approx(0.75)
        assert rdac["gap"] == pytest.approx(0.75)

    def test_gap_needs_both_mechanisms(self) -> None:
        summary = summarize([make_row("g_dac", 1.0)])

        assert math.isnan(summary["gap"].iloc[0])

    def test_gap_with_zero_baseline(self) -> None:
        summary = summarize([make_row("g_dac", 0.0), make_row("g_rdac", 0.0)])

        assert summary["gap"].isna().all()

    def test_failed_rows_are_skipped(self) -> None:
        rows = [make_row("g_dac", 1.0), make_row("g_dac", math.nan, seed=1, status="NoSolution")]

        summary = summarize(rows)

        assert summary["mean_pu"].iloc[0] == pytest.approx(1.0)

    def test_nothing_to_summarize(self) -> None:
        with pytest.raises(EmptyInput):
            summarize([make_row("g_dac", math.nan, status="NoSolution")])


class TestCsv:
    def test_row_file(self, temp_dir: Path) -> None:
        rows = [make_row("g_dac", 1.25), make_row("g_rdac", math.nan, status="NoSolution")]

        path = write_rows_csv(rows, temp_dir / "out" / "rows.csv")

        comment, header = path.read_text().splitlines()[:2]
        assert comment.startswith("# status: ok when")
        assert header == ",".join(ROW_COLUMNS)
        loaded = read_rows_csv(path)
        assert loaded[0] == rows[0]
        assert math.isnan(loaded[1].total_pu_utility)
        assert loaded[1].status == "NoSolution"

    def test_summary_file(self, temp_dir: Path) -> None:
        path = write_summary_csv(summarize([make_row("g_dac", 1.0)]), temp_dir / "summary.csv")

        assert list(pd.read_csv(path).columns) == SUMMARY_COLUMNS


@pytest.mark.slow
class TestMarketTrends:
    @pytest.fixture
    def trend_summary(self, fast_solver: SolverConfig, tmp_path: Path) -> pd.DataFrame:
        exp = ExperimentConfig(
            m_values=(2, 4),
            n_values=tuple(range(1, 9)),
            seeds=200,
            mechanisms=("g_dac", "g_rdac"),
            epsilon=0.01,
            output_directory=tmp_path,
        )
        return summarize(run_sweep(exp, TopologyConfig(), fast_solver, max_workers=None))

    def test_pu_utility_grows_with_more_sus(self, trend_summary: pd.DataFrame) -> None:
        dac = trend_summary[(trend_summary["mechanism"] == "g_dac") & (trend_summary["M"] == 2)]

        rho, _ = stats.spearmanr(dac["N"], dac["mean_pu"])

        assert rho > 0.9

    def test_more_pus_means_less_each(self, trend_summary: pd.DataFrame) -> None:
        dac = trend_summary[trend_summary["mechanism"] == "g_dac"].set_index(["M", "N"])

        for N in range(1, 9):
            assert dac.loc[(4, N), "mean_pu"] / 4 < dac.loc[(2, N), "mean_pu"] / 2

    def test_robust_auction_costs_the_pus(self, trend_summary: pd.DataFrame) -> None:
        gaps = trend_summary[(trend_summary["mechanism"] == "g_dac") & (trend_summary["N"] >= 3)]["gap"]

        assert (gaps > 0).all()
