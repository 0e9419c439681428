"""Command-line interface for the spectrum market simulator."""

from __future__ import annotations

import logging
import math
import multiprocessing
import sys
from dataclasses import replace
from pathlib import Path
from typing import NoReturn

import click
import pandas as pd

from src.channel import read_instance, write_instance
from src.database import SweepRun, close_database, initialize_database
from src.config import SimulatorConfig, load_config, set_config
from src.equilibrium import (
    Assignment,
    read_matching,
    total_pu_utility,
    total_su_utility,
    verify_equilibrium,
    write_matching,
)
from src.errors import MarketError
from src.mechanisms import (
    EXAMPLE_ONE_INTERMEDIATE,
    EXAMPLE_ONE_PU_OPTIMAL,
    EXAMPLE_ONE_SU_OPTIMAL,
    SuReportStrategy,
    dac_fixed,
    dac_with_reports,
    example_one_preferences,
    get_mechanism,
    rdac_fixed,
)
from src.pipeline import equilibrium_sweep, get_max_workers
from src.simulation import generate_topology
from src.utf import GuessUtfModel, UtfModel, gs_utf_curve, utf_curve
from src.validators import ValidationError, validate_index

EXIT_FAILURE = 1
EXIT_USAGE = 2

MECHANISM_CHOICES = ["g-dac", "g-rdac", "gsg-rdac", "brute-force"]


def configure_logging(log_level: str) -> None:
    """Route the root and Prefect loggers to one level, or silence both for OFF."""
    if log_level == "OFF":
        logging.disable(logging.CRITICAL)
        logging.getLogger("prefect").setLevel(logging.CRITICAL + 10)
    else:
        logging.disable(logging.NOTSET)
        numeric_level = getattr(logging, log_level)
        logging.basicConfig(
            level=numeric_level,
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )
        logging.getLogger("prefect").setLevel(numeric_level)


def _fail(message: str, code: int = EXIT_FAILURE) -> NoReturn:
    click.echo(click.style(f"Error: {message}", fg="red"), err=True)
    sys.exit(code)


def _load(ctx: click.Context, config_path: Path | None) -> SimulatorConfig:
    """Read the config file, apply the global flags and install it."""
    try:
        config = load_config(config_path, log_level=ctx.obj["log_level"])
    except ValidationError as e:
        _fail(str(e), EXIT_USAGE)
    set_config(config)
    return config


def _pair_label(m: int, n: int) -> str:
    return f"(m{m + 1}, n{n + 1})"


def _assignment_text(assignment: Assignment) -> str:
    return " ".join(_pair_label(m, n) for m, n in assignment.pairs) or "(empty)"


CONFIG_OPTION = click.option(
    "--config",
    "config_path",
    type=click.Path(path_type=Path),
    default=None,
    help="TOML file with [solver], [topology] and [experiment] tables; built-in defaults when omitted.",
)


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL", "OFF"]),
    default="WARNING",
    show_default=True,
    help="Set logging level. Use 'OFF' to disable logging entirely.",
)
@click.pass_context
def main(ctx: click.Context, log_level: str) -> None:
    """
    Cooperative spectrum sharing market.

    Generate random PU/SU markets, compute equilibria with the auction
    mechanisms, verify them and run experiment sweeps.
    """
    configure_logging(log_level)
    ctx.ensure_object(dict)
    ctx.obj["log_level"] = log_level


@main.command()
@CONFIG_OPTION
@click.option("--seed", type=int, default=1, show_default=True, help="Topology seed.")
@click.option("--pus", type=int, default=2, show_default=True, help="Number of PU pairs.")
@click.option("--sus", type=int, default=4, show_default=True, help="Number of SU pairs.")
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    default=Path("./data/instance.json"),
    show_default=True,
    help="Instance file to write.",
)
@click.pass_context
def gen(ctx: click.Context, config_path: Path | None, seed: int, pus: int, sus: int, out: Path) -> None:
    """Generate a random instance file (gains in dB, noise in dBm)."""
    config = _load(ctx, config_path)
    try:
        instance = generate_topology(config.topology, seed, pus, sus)
    except ValidationError as e:
        _fail(str(e), EXIT_USAGE)

    path = write_instance(instance, out)
    click.echo(f"Wrote {instance.num_pus}x{instance.num_sus} instance to {path}")


@main.command()
@CONFIG_OPTION
@click.option(
    "--instance",
    "instance_path",
    type=click.Path(path_type=Path),
    required=True,
    help="Instance file.",
)
@click.option(
    "--mechanism",
    type=click.Choice(MECHANISM_CHOICES),
    default="g-dac",
    show_default=True,
    help="Mechanism computing the matching.",
)
@click.option("--epsilon", type=float, default=0.01, show_default=True, help="Auction offer increment.")
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    default=Path("./data/output/matching.txt"),
    show_default=True,
    help="Matching file to write.",
)
@click.option(
    "--trace",
    "trace_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Optional CSV log of every proposal, hold and rejection.",
)
@click.pass_context
def solve(
        ctx: click.Context,
        config_path: Path | None,
        instance_path: Path,
        mechanism: str,
        epsilon: float,
        out: Path,
        trace_path: Path | None,
) -> None:
    """
    Compute a matching for an instance.

    Exits with 0 when the mechanism converged and 1 otherwise.
    """
    config = _load(ctx, config_path)
    try:
        instance = read_instance(instance_path)
        runner = get_mechanism(mechanism, epsilon, config.solver)
    except ValidationError as e:
        _fail(str(e), EXIT_USAGE)

    result = runner.execute(instance)
    if not result.success or result.trace is None:
        _fail(f"{mechanism} failed ({result.metadata.get('error_type', 'unknown')}): {result.error}")

    trace = result.trace
    header = (
        f"mechanism {trace.mechanism} epsilon {trace.epsilon or epsilon!r} rounds {trace.rounds} "
        f"certified {str(trace.certified).lower()}"
    )
    write_matching(trace.matching, out, header=header)
    if trace_path is not None:
        trace.write_trace(trace_path)

    click.echo(f"{trace.mechanism}: {len(trace.matching.assignment)} pair(s) after {trace.rounds} round(s)")
    click.echo(f"{'PU':<4} {'SU':<4} {'PU utility':>14} {'SU utility':>14}")
    click.echo("-" * 40)
    for m, n in trace.matching.assignment.pairs:
        click.echo(f"{m:<4} {n:<4} {trace.pu_utilities[m]:>14.6g} {trace.matching.su_utilities[n]:>14.6g}")
    click.echo(f"Total PU utility: {sum(trace.pu_utilities.values()):.6g}")
    click.echo(f"Total SU utility: {total_su_utility(trace.matching):.6g}")
    click.echo(click.style(f"Matching written to {out}", fg="green"))


@main.command()
@CONFIG_OPTION
@click.option("--instance", "instance_path", type=click.Path(path_type=Path), required=True, help="Instance file.")
@click.option("--matching", "matching_path", type=click.Path(path_type=Path), required=True, help="Matching file.")
@click.option(
    "--tol",
    type=float,
    default=None,
    help="Utility tolerance (default: solver equilibrium_tol).",
)
@click.option(
    "--guess-based",
    is_flag=True,
    default=False,
    help="Check against the guess-based transfer curves instead of the full-information ones.",
)
@click.pass_context
def verify(
        ctx: click.Context,
        config_path: Path | None,
        instance_path: Path,
        matching_path: Path,
        tol: float | None,
        guess_based: bool,
) -> None:
    """
    Check that a matching is a market equilibrium.

    Prints the admissible SU utility range of every matched pair and exits
    with 0 iff no condition fails.
    """
    config = _load(ctx, config_path)
    try:
        instance = read_instance(instance_path)
        matching = read_matching(matching_path)
        model = GuessUtfModel(instance, config.solver) if guess_based else UtfModel(instance, config.solver)
        certificate = verify_equilibrium(model, matching, tol, config.solver.contract_tol)
    except ValidationError as e:
        _fail(str(e), EXIT_USAGE)

    click.echo(f"{'PU':<4} {'SU':<4} {'lower':>12} {'delta':>12} {'upper':>12}")
    click.echo("-" * 48)
    for m, n in matching.assignment.pairs:
        click.echo(
            f"{m:<4} {n:<4} {certificate.lower[n]:>12.6g} "
            f"{matching.su_utilities[n]:>12.6g} {certificate.upper[n]:>12.6g}"
        )
    click.echo(f"Total PU utility: {total_pu_utility(model, matching):.6g}")

    if certificate.verdict:
        click.echo(click.style("Verdict: equilibrium", fg="green"))
        return

    click.echo(click.style("Verdict: not an equilibrium", fg="red"))
    for violation in certificate.violations:
        click.echo(f"  {violation}")
    sys.exit(EXIT_FAILURE)


@main.command()
@CONFIG_OPTION
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    default=None,
    help="Output directory for rows.csv and summary.csv (default: [experiment] output_directory).",
)
@click.option("--seeds", type=int, default=None, help="Override the number of seeds per cell.")
@click.option(
    "--jobs",
    type=int,
    default=None,
    help=f"Worker processes (default: CPU count = {multiprocessing.cpu_count()}).",
)
@click.option(
    "--db-path",
    type=click.Path(path_type=Path),
    default=None,
    help="Also store the rows in this SQLite database.",
)
@click.pass_context
def sweep(
        ctx: click.Context,
        config_path: Path | None,
        out: Path | None,
        seeds: int | None,
        jobs: int | None,
        db_path: Path | None,
) -> None:
    """
    Run an experiment sweep over market sizes, seeds and mechanisms.

    \b
    Examples:
        spectrum-market sweep --config demo_data/config.toml --seeds 100
        spectrum-market sweep --jobs 4 --out ./data/output/run1
    """
    config = _load(ctx, config_path)
    experiment = config.experiment
    try:
        if out is not None:
            experiment = replace(experiment, output_directory=out)
        if seeds is not None:
            experiment = replace(experiment, seeds=seeds)
    except ValidationError as e:
        _fail(str(e), EXIT_USAGE)
    config = replace(config, experiment=experiment)
    set_config(config)

    cells = len(experiment.m_values) * len(experiment.n_values) * experiment.seeds * len(experiment.mechanisms)
    click.echo(f"Running {cells} cell(s) on {get_max_workers(jobs)} worker(s)...")

    outcome = equilibrium_sweep(config, max_workers=jobs, db_path=db_path)
    execution = outcome.execution

    click.echo()
    click.echo("=" * 50)
    click.echo("Sweep Summary")
    click.echo("=" * 50)
    click.echo(f"  Cells:     {execution.total}")
    click.echo(f"  Succeeded: {click.style(str(execution.succeeded), fg='green')}")
    click.echo(f"  Failed:    {click.style(str(execution.failed), fg='red' if execution.failed else 'green')}")
    click.echo(f"  Rows:      {outcome.rows_path}")
    if outcome.summary_path is not None:
        click.echo(f"  Summary:   {outcome.summary_path}")
    if outcome.run_id is not None:
        click.echo(f"  Stored as sweep run {outcome.run_id} in {db_path}")

    if execution.failed > 0:
        sys.exit(EXIT_FAILURE)


@main.command()
def example1() -> None:
    """
    Deferred acceptance on three PUs and three SUs with cyclic preferences.

    The market has exactly three stable assignments; the PU-proposing and
    SU-proposing runs reach the two extremes, and SU n1 can steer the
    PU-proposing run by truncating its list.
    """
    prefs = example_one_preferences()
    cases = [
        ("DAC (PUs propose)", dac_fixed(prefs), EXAMPLE_ONE_PU_OPTIMAL),
        ("RDAC (SUs propose)", rdac_fixed(prefs), EXAMPLE_ONE_SU_OPTIMAL),
        (
            "DAC, n1 reports {m2, m3}",
            dac_with_reports(prefs, {0: SuReportStrategy("truncate", (1, 2))}),
            EXAMPLE_ONE_INTERMEDIATE,
        ),
        (
            "DAC, n1 reports {m2}",
            dac_with_reports(prefs, {0: SuReportStrategy("truncate", (1,))}),
            EXAMPLE_ONE_SU_OPTIMAL,
        ),
    ]

    click.echo(f"{'Run':<28} {'Assignment'}")
    click.echo("-" * 70)
    mismatches = 0
    for name, assignment, expected in cases:
        ok = assignment == expected
        mismatches += not ok
        mark = click.style("ok", fg="green") if ok else click.style(f"expected {_assignment_text(expected)}", fg="red")
        click.echo(f"{name:<28} {_assignment_text(assignment)}  {mark}")

    if mismatches:
        sys.exit(EXIT_FAILURE)


@main.command()
@CONFIG_OPTION
@click.option("--instance", "instance_path", type=click.Path(path_type=Path), required=True, help="Instance file.")
@click.option("--pu", type=int, default=0, show_default=True, help="PU index.")
@click.option("--su", type=int, default=0, show_default=True, help="SU index.")
@click.option("--points", type=int, default=50, show_default=True, help="Samples of the full-information curve.")
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    default=Path("./data/output/curve.csv"),
    show_default=True,
    help="CSV file to write.",
)
@click.option(
    "--guess-based",
    is_flag=True,
    default=False,
    help="Write the guess-based curve table instead.",
)
@click.pass_context
def curve(
        ctx: click.Context,
        config_path: Path | None,
        instance_path: Path,
        pu: int,
        su: int,
        points: int,
        out: Path,
        guess_based: bool,
) -> None:
    """Export the utility transfer curve of one PU/SU pair as CSV."""
    config = _load(ctx, config_path)
    try:
        instance = read_instance(instance_path)
        pu = validate_index(pu, instance.num_pus, "pu")
        su = validate_index(su, instance.num_sus, "su")
        if guess_based:
            table = gs_utf_curve(instance, pu, su, config.solver)
            frame = pd.DataFrame({
                "guess": table.guesses,
                "delta": table.su_values,
                "pu_utility": table.pu_values,
            })
        else:
            frame = utf_curve(instance, pu, su, config.solver, points)
    except ValidationError as e:
        _fail(str(e), EXIT_USAGE)
    except MarketError as e:
        _fail(str(e))

    out.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out, index=False, float_format="%.10g")
    finite = frame["pu_utility"].map(math.isfinite).sum()
    click.echo(f"Wrote {len(frame)} sample(s) ({finite} finite) to {out}")


# =============================================================================
# Stored Sweeps
# =============================================================================

@main.command()
@click.option(
    "--db-path",
    type=click.Path(path_type=Path),
    default=Path("./data/sweeps.db"),
    show_default=True,
    help="Path to SQLite database.",
)
@click.option("--limit", type=int, default=20, show_default=True, help="Maximum number of runs to show.")
def runs(db_path: Path, limit: int) -> None:
    """List sweeps stored in the database."""
    initialize_database(db_path)
    try:
        stored = list(SweepRun.select().order_by(SweepRun.created_at.desc()).limit(limit))
        if not stored:
            click.echo("No sweeps found.")
            return

        click.echo(f"{'ID':<6} {'Status':<12} {'Rows':<8} {'Created'}")
        click.echo("-" * 60)
        for run in stored:
            color = {"completed": "green", "running": "yellow", "failed": "red"}.get(run.status, "white")
            click.echo(
                f"{run.id:<6} {click.style(f'{run.status:<12}', fg=color)} "
                f"{run.row_count:<8} {run.created_at}"
            )
    finally:
        close_database()


if __name__ == "__main__":
    main()
