"""Random network topologies and the two hand-made illustration markets.

Transmitters are dropped uniformly in a square; each receiver sits at the
configured pair distance, jittered, in a uniformly random direction that
keeps it inside the square. Gains follow a log-distance path loss.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from src.channel.model import (
    LinkGains,
    NetworkInstance,
    Position,
    PuParams,
    SuParams,
    db_to_linear,
    dbm_to_mw,
)
from src.config import TopologyConfig
from src.validators.input_validators import validate_nonnegative

logger = logging.getLogger(__name__)

MAX_PLACEMENT_ATTEMPTS = 1000


def pathloss_db(distance: float, cfg: TopologyConfig) -> float:
    """Channel power gain in dB at ``distance`` meters; distances under 1 m count as 1 m."""
    return cfg.pathloss_constant_db - 10.0 * cfg.pathloss_exponent * math.log10(max(distance, 1.0))


def _gain(a: Position, b: Position, cfg: TopologyConfig, extra_db: float = 0.0) -> float:
    return db_to_linear(pathloss_db(math.dist(a, b), cfg) + extra_db)


def _place_pair(rng: np.random.Generator, cfg: TopologyConfig, distance: float) -> tuple[Position, Position]:
    side = cfg.area_side
    jitter = cfg.distance_jitter
    tx = (float(rng.uniform(0.0, side)), float(rng.uniform(0.0, side)))
    d = distance * (1.0 + float(rng.uniform(-jitter, jitter)))

    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        angle = float(rng.uniform(0.0, 2.0 * math.pi))
        rx = (tx[0] + d * math.cos(angle), tx[1] + d * math.sin(angle))
        if 0.0 <= rx[0] <= side and 0.0 <= rx[1] <= side:
            return tx, rx

    # no direction fits: aim at the farthest corner and stop at the boundary
    corner = (0.0 if tx[0] > side / 2.0 else side, 0.0 if tx[1] > side / 2.0 else side)
    reach = min(d, math.dist(tx, corner))
    angle = math.atan2(corner[1] - tx[1], corner[0] - tx[0])
    rx = (
        min(max(tx[0] + reach * math.cos(angle), 0.0), side),
        min(max(tx[1] + reach * math.sin(angle), 0.0), side),
    )
    return tx, rx


def generate_topology(cfg: TopologyConfig, seed: int, num_pus: int, num_sus: int) -> NetworkInstance:
    """
    Random market with ``num_pus`` PU pairs and ``num_sus`` SU pairs.

    The generator is seeded from ``(seed, num_pus, num_sus)``, so the same
    arguments always give the same instance.
    """
    validate_nonnegative(seed, "seed")
    validate_nonnegative(num_pus, "num_pus")
    validate_nonnegative(num_sus, "num_sus")
    rng = np.random.default_rng([int(seed), int(num_pus), int(num_sus)])

    pu_pairs = [_place_pair(rng, cfg, cfg.pu_pair_distance) for _ in range(num_pus)]
    su_pairs = [_place_pair(rng, cfg, cfg.su_pair_distance) for _ in range(num_sus)]

    pus = tuple(
        PuParams(
            id=m,
            direct_gain_sq=_gain(tx, rx, cfg, cfg.pu_direct_extra_attenuation_db),
            coop_time=cfg.coop_time,
            position_tx=tx,
            position_rx=rx,
        )
        for m, (tx, rx) in enumerate(pu_pairs)
    )
    sus = tuple(
        SuParams(
            id=n,
            power_sensitivity=cfg.power_sensitivity,
            # path loss is frequency-flat, so every band sees the same gain
            direct_gain_sq_per_pu=(_gain(tx, rx, cfg),) * num_pus,
            position_tx=tx,
            position_rx=rx,
        )
        for n, (tx, rx) in enumerate(su_pairs)
    )
    links = tuple(
        tuple(
            LinkGains(g1_sq=_gain(pu_tx, su_tx, cfg), g2_sq=_gain(su_tx, pu_rx, cfg))
            for su_tx, _ in su_pairs
        )
        for pu_tx, pu_rx in pu_pairs
    )

    instance = NetworkInstance(
        pus=pus,
        sus=sus,
        links=links,
        noise_power=dbm_to_mw(cfg.noise_dbm),
        log_base=cfg.log_base,
        label=f"seed={seed} M={num_pus} N={num_sus}",
    )
    logger.debug(f"Generated topology {instance.label}")
    return instance


# =============================================================================
# Illustration markets
# =============================================================================

FIXTURE_PU_DIRECT_DB = -110.0
FIXTURE_LINK_DB = -90.0
FIXTURE_NOISE_DBM = -105.0


def _fixture(pu_direct_db: tuple[float, ...], power_sensitivities: tuple[float, ...], label: str) -> NetworkInstance:
    link_gain = db_to_linear(FIXTURE_LINK_DB)
    num_pus = len(pu_direct_db)
    pus = tuple(
        PuParams(id=m, direct_gain_sq=db_to_linear(g), coop_time=1.0)
        for m, g in enumerate(pu_direct_db)
    )
    sus = tuple(
        SuParams(id=n, power_sensitivity=c, direct_gain_sq_per_pu=(link_gain,) * num_pus)
        for n, c in enumerate(power_sensitivities)
    )
    links = tuple(
        tuple(LinkGains(g1_sq=link_gain, g2_sq=link_gain) for _ in sus)
        for _ in pus
    )
    return NetworkInstance(
        pus=pus, sus=sus, links=links, noise_power=dbm_to_mw(FIXTURE_NOISE_DBM), label=label,
    )


def one_pu_two_su_fixture() -> NetworkInstance:
    """One PU courted by two SUs that differ only in energy cost (1 and 2)."""
    return _fixture((FIXTURE_PU_DIRECT_DB,), (1.0, 2.0), "one_pu_two_su")


def two_pu_one_su_fixture() -> NetworkInstance:
    """Two PUs competing for one SU; the second PU's direct link is 10 dB stronger."""
    return _fixture((FIXTURE_PU_DIRECT_DB, -100.0), (1.0,), "two_pu_one_su")
