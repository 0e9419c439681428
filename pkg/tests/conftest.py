"""Shared pytest fixtures for all tests."""

from __future__ import annotations

import tempfile
from pathlib import Path
from typing import Callable, Generator, Sequence

import pytest
from peewee import SqliteDatabase
from prefect.testing.utilities import prefect_test_harness

from src.channel import LinkGains, NetworkInstance, PuParams, SuParams, db_to_linear, dbm_to_mw
from src.config import SimulatorConfig, SolverConfig, get_config, set_config
from src.database import close_database, db, initialize_database
from src.database.models import SweepRecord, SweepRun
from src.simulation import one_pu_two_su_fixture, two_pu_one_su_fixture
from src.utf import UtfModel

MarketFactory = Callable[..., NetworkInstance]


def build_market(
        pu_direct_db: Sequence[float],
        su_costs: Sequence[float],
        link_db: Sequence[Sequence[float]] | float = -90.0,
        su_direct_db: float = -90.0,
        noise_dbm: float = -105.0,
) -> NetworkInstance:
    """Hand-made market; ``link_db[m][n]`` sets both relay hops of pair (m, n)."""
    M, N = len(pu_direct_db), len(su_costs)
    if isinstance(link_db, (int, float)):
        link_db = [[float(link_db)] * N for _ in range(M)]

    return NetworkInstance(
        pus=tuple(PuParams(id=m, direct_gain_sq=db_to_linear(g), coop_time=1.0) for m, g in enumerate(pu_direct_db)),
        sus=tuple(
            SuParams(id=n, power_sensitivity=c, direct_gain_sq_per_pu=(db_to_linear(su_direct_db),) * M)
            for n, c in enumerate(su_costs)
        ),
        links=tuple(
            tuple(LinkGains(g1_sq=db_to_linear(link_db[m][n]), g2_sq=db_to_linear(link_db[m][n])) for n in range(N))
            for m in range(M)
        ),
        noise_power=dbm_to_mw(noise_dbm),
        label="test",
    )


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def test_config(temp_dir: Path) -> Generator[SimulatorConfig, None, None]:
    """Create a test configuration with temporary paths."""
    config = SimulatorConfig(
        database_path=temp_dir / "test.db",
        log_level="OFF",  # Suppress logs during tests
    )

    original_config = get_config()
    set_config(config)

    yield config

    set_config(original_config)


@pytest.fixture
def solver_config() -> SolverConfig:
    """Default solver settings."""
    return SolverConfig()


@pytest.fixture
def fast_solver() -> SolverConfig:
    """Coarser solver for tests that run many auctions."""
    return SolverConfig(grid_points=128, refine_iters=40)


@pytest.fixture
def market() -> MarketFactory:
    """Factory for hand-made markets."""
    return build_market


@pytest.fixture
def single_pair() -> NetworkInstance:
    """One PU and one SU that both gain from cooperating."""
    return build_market([-110.0], [1.0])


@pytest.fixture
def one_pu_two_su() -> NetworkInstance:
    return one_pu_two_su_fixture()


@pytest.fixture
def two_pu_one_su() -> NetworkInstance:
    return two_pu_one_su_fixture()


@pytest.fixture
def two_by_two() -> NetworkInstance:
    """Two PUs and two SUs with distinct links, so the SUs are not interchangeable."""
    return build_market(
        [-110.0, -108.0],
        [1.0, 1.3],
        link_db=[[-88.0, -92.0], [-93.0, -89.0]],
    )


@pytest.fixture
def two_by_two_model(two_by_two: NetworkInstance, solver_config: SolverConfig) -> UtfModel:
    return UtfModel(two_by_two, solver_config)


@pytest.fixture
def test_db(test_config: SimulatorConfig) -> Generator[SqliteDatabase, None, None]:
    """Initialize a test database with all tables."""
    initialize_database(test_config.database_path)

    yield db

    # Cleanup
    SweepRecord.delete().execute()
    SweepRun.delete().execute()
    close_database()


@pytest.fixture(scope="session")
def prefect_harness() -> Generator[None, None, None]:
    """Run flows against a temporary Prefect backend."""
    with prefect_test_harness():
        yield
