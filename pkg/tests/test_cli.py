"""Tests for the command-line interface."""

from __future__ import annotations

import re
from pathlib import Path

import pandas as pd
import pytest
from click.testing import CliRunner

from src.cli import main


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def instance_file(runner: CliRunner, temp_dir: Path) -> Path:
    path = temp_dir / "instance.json"
    result = runner.invoke(main, ["--log-level", "OFF", "gen", "--seed", "7", "--pus", "2", "--sus", "3",
                                  "--out", str(path)])
    assert result.exit_code == 0, result.output
    return path


@pytest.fixture
def fast_config_file(temp_dir: Path) -> Path:
    path = temp_dir / "config.toml"
    path.write_text(
        "[solver]\ngrid_points = 128\nrefine_iters = 40\n\n"
        "[experiment]\nm_values = [2]\nn_values = [2]\nseeds = 2\n"
        f"output_directory = '{(temp_dir / 'output').as_posix()}'\n",
        encoding="utf-8",
    )
    return path


def solve(runner: CliRunner, instance: Path, out: Path, *extra: str) -> None:
    result = runner.invoke(main, ["--log-level", "OFF", "solve", "--instance", str(instance), "--out", str(out),
                                  *extra])
    assert result.exit_code == 0, result.output + result.stderr


def verify(runner: CliRunner, instance: Path, matching: Path):  # type: ignore[no-untyped-def]
    return runner.invoke(main, ["--log-level", "OFF", "verify", "--instance", str(instance),
                                "--matching", str(matching)])


class TestExampleOne:
    def test_all_runs_match(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["example1"])

        assert result.exit_code == 0
        assert result.output.count("ok") == 4
        assert "(m1, n1) (m2, n2) (m3, n3)" in result.output


class TestGen:
    def test_same_seed_same_bytes(self, runner: CliRunner, temp_dir: Path) -> None:
        first, second = temp_dir / "a.json", temp_dir / "b.json"
        for path in (first, second):
            runner.invoke(main, ["--log-level", "OFF", "gen", "--seed", "3", "--out", str(path)])

        assert first.read_bytes() == second.read_bytes()

    def test_negative_size_is_a_usage_error(self, runner: CliRunner, temp_dir: Path) -> None:
        result = runner.invoke(main, ["--log-level", "OFF", "gen", "--pus", "-1", "--out", str(temp_dir / "x.json")])

        assert result.exit_code == 2


class TestSolveAndVerify:
    @pytest.mark.parametrize("mechanism", ["g-dac", "g-rdac", "brute-force"])
    def test_round_trip(self, runner: CliRunner, instance_file: Path, temp_dir: Path, mechanism: str) -> None:
        matching = temp_dir / f"{mechanism}.txt"
        solve(runner, instance_file, matching, "--mechanism", mechanism)

        result = verify(runner, instance_file, matching)

        assert result.exit_code == 0, result.output
        assert "Verdict: equilibrium" in result.output

    def test_trace_file(self, runner: CliRunner, instance_file: Path, temp_dir: Path) -> None:
        trace = temp_dir / "trace.csv"
        solve(runner, instance_file, temp_dir / "matching.txt", "--trace", str(trace))

        assert trace.read_text().startswith("round,actor,action,target,value\n")

    def test_edited_matching_fails(self, runner: CliRunner, instance_file: Path, temp_dir: Path) -> None:
        matching = temp_dir / "matching.txt"
        solve(runner, instance_file, matching)
        text = matching.read_text()
        # hand the first matched SU far more than any PU can afford
        edited = re.sub(r"delta (\S+)", lambda match: f"delta {float(match.group(1)) + 50.0!r}", text, count=1)
        matching.write_text(edited)

        result = verify(runner, instance_file, matching)

        assert result.exit_code == 1
        assert "Verdict: not an equilibrium" in result.output
        assert re.search(r"\b(IR|IC)\b", result.output)

    def test_edited_contract_fails(self, runner: CliRunner, instance_file: Path, temp_dir: Path) -> None:
        matching = temp_dir / "matching.txt"
        solve(runner, instance_file, matching)
        # same SU utility, but the first pair now trades access time for no relaying
        edited = re.sub(r"p \S+ t \S+", "p 0.0 t 10.0", matching.read_text(), count=1)
        matching.write_text(edited)

        result = verify(runner, instance_file, matching)

        assert result.exit_code == 1
        assert "Contract" in result.output

    def test_malformed_matching_is_a_usage_error(self, runner: CliRunner, instance_file: Path, temp_dir: Path) -> None:
        matching = temp_dir / "matching.txt"
        matching.write_text("m 0 n zero\n")

        assert verify(runner, instance_file, matching).exit_code == 2

    def test_brute_force_refuses_large_markets(self, runner: CliRunner, temp_dir: Path) -> None:
        instance = temp_dir / "big.json"
        runner.invoke(main, ["--log-level", "OFF", "gen", "--pus", "5", "--sus", "5", "--out", str(instance)])

        result = runner.invoke(main, ["--log-level", "OFF", "solve", "--instance", str(instance),
                                      "--mechanism", "brute-force", "--out", str(temp_dir / "m.txt")])

        assert result.exit_code == 1
        assert "InstanceTooLarge" in result.stderr

    def test_missing_instance_is_a_usage_error(self, runner: CliRunner, temp_dir: Path) -> None:
        result = runner.invoke(main, ["--log-level", "OFF", "solve", "--instance", str(temp_dir / "absent.json")])

        assert result.exit_code == 2


class TestConfigFile:
    def test_unknown_key_is_a_usage_error(self, runner: CliRunner, temp_dir: Path) -> None:
        config = temp_dir / "bad.toml"
        config.write_text("[solver]\ngrid_pionts = 64\n")

        result = runner.invoke(main, ["gen", "--config", str(config), "--out", str(temp_dir / "i.json")])

        assert result.exit_code == 2
        assert "grid_pionts" in result.stderr


class TestCurve:
    def test_full_information(self, runner: CliRunner, instance_file: Path, temp_dir: Path) -> None:
        out = temp_dir / "curve.csv"

        result = runner.invoke(main, ["--log-level", "OFF", "curve", "--instance", str(instance_file),
                                      "--points", "12", "--out", str(out)])

        assert result.exit_code == 0, result.output
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["delta", "pu_utility", "relay_power", "access_time"]
        assert len(frame) == 12

    def test_pair_outside_the_market(self, runner: CliRunner, instance_file: Path, temp_dir: Path) -> None:
        result = runner.invoke(main, ["--log-level", "OFF", "curve", "--instance", str(instance_file),
                                      "--pu", "9", "--out", str(temp_dir / "c.csv")])

        assert result.exit_code == 2

    def test_su_outside_the_market(self, runner: CliRunner, instance_file: Path, temp_dir: Path) -> None:
        result = runner.invoke(main, ["--log-level", "OFF", "curve", "--instance", str(instance_file),
                                      "--su", "3", "--out", str(temp_dir / "c.csv")])

        assert result.exit_code == 2
        assert "index 3 out of range" in result.stderr


@pytest.mark.usefixtures("prefect_harness", "test_config")
class TestSweep:
    def test_sweep_writes_files_and_stores_rows(self, runner: CliRunner, fast_config_file: Path,
                                                temp_dir: Path) -> None:
        db_path = temp_dir / "sweeps.db"

        result = runner.invoke(main, ["--log-level", "OFF", "sweep", "--config", str(fast_config_file),
                                      "--jobs", "1", "--db-path", str(db_path)])

        assert result.exit_code == 0, result.output
        assert len(pd.read_csv(temp_dir / "output" / "rows.csv", comment="#")) == 4
        assert (temp_dir / "output" / "summary.csv").exists()

        listed = runner.invoke(main, ["runs", "--db-path", str(db_path)])
        assert "completed" in listed.output

    def test_runs_on_empty_database(self, runner: CliRunner, temp_dir: Path) -> None:
        result = runner.invoke(main, ["runs", "--db-path", str(temp_dir / "empty.db")])

        assert result.exit_code == 0
        assert "No sweeps found." in result.output
