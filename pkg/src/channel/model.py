"""Physical-layer quantities and the PU/SU utility functions.

Every gain and the noise power are linear power ratios. Transmit powers of
PUs and SUs are normalized to 1, so relay power is measured in units of the
PU transmit power.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TypeVar

import numpy as np
import numpy.typing as npt

from src.config import LogBase
from src.validators.input_validators import (
    ValidationError,
    validate_nonnegative,
    validate_positive,
)

FloatArray = npt.NDArray[np.float64]
Value = TypeVar("Value", float, FloatArray)

Position = tuple[float, float]


def log_rate(x: Value, log_base: LogBase) -> Value:
    """Capacity-style logarithm ``log(x)`` in the configured base."""
    if log_base == "base2":
        return np.log2(x)  # type: ignore[return-value]
    return np.log(x)  # type: ignore[return-value]


def db_to_linear(value_db: float) -> float:
    return float(10.0 ** (value_db / 10.0))


def linear_to_db(value: float) -> float:
    return float(10.0 * np.log10(value))


# dBm and mW convert exactly like dB and linear ratios
dbm_to_mw = db_to_linear
mw_to_dbm = linear_to_db


# =============================================================================
# Domain types
# =============================================================================

@dataclass(frozen=True)
class PuParams:
    """A primary transmitter/receiver pair."""

    id: int
    direct_gain_sq: float
    coop_time: float
    position_tx: Position | None = None
    position_rx: Position | None = None

    def __post_init__(self) -> None:
        validate_positive(self.direct_gain_sq, f"pus[{self.id}].direct_gain_sq")
        validate_positive(self.coop_time, f"pus[{self.id}].coop_time")


@dataclass(frozen=True)
class SuParams:
    """A secondary pair, with its direct gain on every PU band."""

    id: int
    power_sensitivity: float
    direct_gain_sq_per_pu: tuple[float, ...]
    position_tx: Position | None = None
    position_rx: Position | None = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "direct_gain_sq_per_pu", tuple(float(g) for g in self.direct_gain_sq_per_pu)
        )
        validate_positive(self.power_sensitivity, f"sus[{self.id}].power_sensitivity")
        for m, gain in enumerate(self.direct_gain_sq_per_pu):
            validate_positive(gain, f"sus[{self.id}].direct_gain_sq_per_pu[{m}]")


@dataclass(frozen=True)
class LinkGains:
    """Relay channel gains: PT_m to ST_n (``g1_sq``) and ST_n to PR_m (``g2_sq``)."""

    g1_sq: float
    g2_sq: float

    def __post_init__(self) -> None:
        validate_positive(self.g1_sq, "g1_sq")
        validate_positive(self.g2_sq, "g2_sq")


@dataclass(frozen=True)
class ResourceExchange:
    """Contract of one matched pair: relay power given, access time received."""

    relay_power: float
    access_time: float

    def __post_init__(self) -> None:
        validate_nonnegative(self.relay_power, "relay_power")
        validate_nonnegative(self.access_time, "access_time")


NO_EXCHANGE = ResourceExchange(relay_power=0.0, access_time=0.0)


@dataclass(frozen=True)
class NetworkInstance:
    """
    The market: M PUs, N SUs, an M x N matrix of relay links and the noise.

    Immutable after construction; safe to share across threads and to pickle
    into worker processes.
    """

    pus: tuple[PuParams, ...]
    sus: tuple[SuParams, ...]
    links: tuple[tuple[LinkGains, ...], ...]
    noise_power: float
    log_base: LogBase = "natural"
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pus", tuple(self.pus))
        object.__setattr__(self, "sus", tuple(self.sus))
        object.__setattr__(self, "links", tuple(tuple(row) for row in self.links))

        validate_positive(self.noise_power, "noise_power")
        if self.log_base not in ("natural", "base2"):
            raise ValidationError(f"unknown log base '{self.log_base}'", "log_base")

        for m, pu in enumerate(self.pus):
            if pu.id != m:
                raise ValidationError(f"PU at position {m} has id {pu.id}", "pus")
        for n, su in enumerate(self.sus):
            if su.id != n:
                raise ValidationError(f"SU at position {n} has id {su.id}", "sus")
            if len(su.direct_gain_sq_per_pu) != self.num_pus:
                raise ValidationError(
                    f"SU {n} carries {len(su.direct_gain_sq_per_pu)} band gains, "
                    f"expected {self.num_pus}",
                    "sus",
                )

        if len(self.links) != self.num_pus or any(
            len(row) != self.num_sus for row in self.links
        ):
            raise ValidationError(
                f"links must be a {self.num_pus}x{self.num_sus} matrix", "links"
            )

    @property
    def num_pus(self) -> int:
        return len(self.pus)

    @property
    def num_sus(self) -> int:
        return len(self.sus)

    def link(self, m: int, n: int) -> LinkGains:
        return self.links[m][n]

    def pu_utility(self, m: int, n: int, exchange: ResourceExchange) -> float:
        """PU m's utility when cooperating with SU n under ``exchange``."""
        return float(pu_utility(
            self.pus[m], self.links[m][n], self.noise_power, exchange.relay_power,
            exchange.access_time, self.log_base,
        ))

    def su_utility(self, m: int, n: int, exchange: ResourceExchange) -> float:
        """SU n's utility when cooperating with PU m under ``exchange``."""
        return float(su_utility(
            self.sus[n], m, self.pus[m].coop_time, exchange.relay_power,
            exchange.access_time, self.noise_power, self.log_base,
        ))

    def su_rate(self, m: int, n: int) -> float:
        return float(su_rate(self.sus[n], m, self.noise_power, self.log_base))

    def su_type(self, m: int, n: int) -> float:
        return su_type(self.sus[n], m, self.pus[m].coop_time, self.noise_power, self.log_base)

    def non_cooperative_loss(self, m: int) -> float:
        """``log(1 + kappa_d)``: PU m's direct rate, the baseline of its utility."""
        kd = direct_snr(self.pus[m], self.noise_power)
        return float(log_rate(1.0 + kd, self.log_base))


# =============================================================================
# Closed-form utilities
# =============================================================================

def direct_snr(pu: PuParams, noise_power: float) -> float:
    """SNR of PU m's direct channel at unit transmit power."""
    return pu.direct_gain_sq / noise_power


def relay_snr(p: Value, link: LinkGains, noise_power: float) -> Value:
    """
    SNR contributed by an amplify-and-forward relay transmitting with power ``p``.

    Nondecreasing in ``p`` and bounded above by ``g1_sq / noise_power``.
    """
    g1, g2 = link.g1_sq, link.g2_sq
    return p * g1 * g2 / ((p * g2 + g1 + noise_power) * noise_power)  # type: ignore[return-value]


def pu_utility(
        pu: PuParams,
        link: LinkGains,
        noise_power: float,
        relay_power: Value,
        access_time: Value,
        log_base: LogBase = "natural",
) -> Value:
    """
    Rate increase of PU m from cooperation.

    The cooperative rate is earned over ``T_m`` out of a frame of
    ``T_m + t`` (half of it relayed), compared with transmitting directly.
    May be negative.
    """
    kd = direct_snr(pu, noise_power)
    kn = relay_snr(relay_power, link, noise_power)
    T = pu.coop_time
    coop_rate = T * log_rate(1.0 + kd + kn, log_base) / (2.0 * (T + access_time))
    return coop_rate - log_rate(1.0 + kd, log_base)  # type: ignore[no-any-return]


def su_rate(su: SuParams, pu_band_index: int, noise_power: float, log_base: LogBase = "natural") -> float:
    """SU n's own rate when transmitting on PU m's band at unit power."""
    snr = su.direct_gain_sq_per_pu[pu_band_index] / noise_power
    return float(log_rate(1.0 + snr, log_base))


def su_utility(
        su: SuParams,
        pu_band_index: int,
        coop_time: float,
        relay_power: Value,
        access_time: Value,
        noise_power: float,
        log_base: LogBase = "natural",
) -> Value:
    """
    Net utility of SU n: rate earned in its access time minus energy spent.

    Energy is spent relaying for half of the cooperation time and
    transmitting during the access time, priced at ``C_n`` per unit.
    """
    R = su_rate(su, pu_band_index, noise_power, log_base)
    C = su.power_sensitivity
    t = access_time
    return (t * (R - C) - relay_power * C * coop_time / 2.0) / (coop_time + t)  # type: ignore[no-any-return]


def su_type(
        su: SuParams,
        pu_band_index: int,
        coop_time: float,
        noise_power: float,
        log_base: LogBase = "natural",
) -> float:
    """
    Scalar summary of SU n's private information on PU m's band.

    Negative when the band is not worth its energy cost.
    """
    R = su_rate(su, pu_band_index, noise_power, log_base)
    C = su.power_sensitivity
    return 2.0 * (R - C) / (C * coop_time)


def gs_constant(su: SuParams, coop_time: float, access_time: Value) -> Value:
    """Factor A in ``Delta = (t * H - p) * A``."""
    return su.power_sensitivity * coop_time / (2.0 * (coop_time + access_time))  # type: ignore[no-any-return]


@dataclass(frozen=True)
class DerivedRates:
    """Every intermediate quantity of one pair under one exchange."""

    snr_direct: float
    snr_relay: float
    rate_coop: float
    rate_effective: float
    rate_direct: float
    su_rate: float
    su_energy: float
    gs_constant: float


def derived_rates(instance: NetworkInstance, m: int, n: int, exchange: ResourceExchange) -> DerivedRates:
    """Collect the intermediate rates of pair (m, n) for inspection and tests."""
    pu = instance.pus[m]
    su = instance.sus[n]
    sigma2 = instance.noise_power
    p, t = exchange.relay_power, exchange.access_time
    T = pu.coop_time

    kd = direct_snr(pu, sigma2)
    kn = float(relay_snr(p, instance.link(m, n), sigma2))
    rate_coop = float(log_rate(1.0 + kd + kn, instance.log_base)) / 2.0

    return DerivedRates(
        snr_direct=kd,
        snr_relay=kn,
        rate_coop=rate_coop,
        rate_effective=rate_coop * T / (T + t),
        rate_direct=float(log_rate(1.0 + kd, instance.log_base)),
        su_rate=su_rate(su, m, sigma2, instance.log_base),
        su_energy=(p * T / 2.0 + t) / (T + t),
        gs_constant=float(gs_constant(su, T, t)),
    )
