"""Utility transfer function f (PU utility given an SU reservation) and its inverse g."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Protocol

import numpy as np
import pandas as pd

from src.channel.model import (
    FloatArray,
    NetworkInstance,
    ResourceExchange,
    direct_snr,
    log_rate,
    pu_utility,
    relay_snr,
    su_utility,
)
from src.config import SolverConfig, get_config
from src.errors import InfeasibleReservation, TargetUnreachable
from src.utf.search import bisect_decreasing, grid_then_golden
from src.validators.input_validators import ValidationError

logger = logging.getLogger(__name__)

InverseMethod = Literal["bisection", "dual"]

_ZERO = 1e-15


@dataclass(frozen=True)
class UtfSolution:
    """Result of one transfer-function solve."""

    pu_utility: float
    exchange: ResourceExchange | None
    feasible: bool


def _solver_config(cfg: SolverConfig | None) -> SolverConfig:
    return cfg if cfg is not None else get_config().solver


def reservation_line(instance: NetworkInstance, m: int, n: int, delta: float) -> tuple[float, float]:
    """
    Coefficients ``(a, b)`` of the relay power ``p(t) = a * t - b`` that gives
    SU n exactly ``delta`` when it receives access time ``t`` from PU m.
    """
    R = instance.su_rate(m, n)
    C = instance.sus[n].power_sensitivity
    T = instance.pus[m].coop_time
    a = 2.0 * (R - C - delta) / (C * T)
    b = 2.0 * delta / C
    return a, b


def feasible_time_interval(
        instance: NetworkInstance,
        m: int,
        n: int,
        delta: float,
        cfg: SolverConfig | None = None,
) -> tuple[float, float] | None:
    """Access times for which the tight relay power lies in ``[0, p_max]``; None if empty."""
    cfg = _solver_config(cfg)
    t_cap = cfg.time_cap(instance.pus[m].coop_time)
    a, b = reservation_line(instance, m, n, delta)

    if abs(a) <= _ZERO:
        return (0.0, t_cap) if delta <= _ZERO else None
    if a < 0:
        return (0.0, 0.0) if delta <= _ZERO else None

    lo = max(0.0, b / a)
    hi = min(t_cap, (cfg.p_max + b) / a)
    if lo > hi + 1e-12 * (1.0 + hi):
        return None
    return lo, max(lo, hi)


def max_reservation(instance: NetworkInstance, m: int, n: int, cfg: SolverConfig | None = None) -> float:
    """Largest SU utility PU m can ever grant SU n: all access time, no relaying."""
    cfg = _solver_config(cfg)
    T = instance.pus[m].coop_time
    t_cap = cfg.time_cap(T)
    surplus = instance.su_rate(m, n) - instance.sus[n].power_sensitivity
    return max(0.0, t_cap * surplus / (T + t_cap))


def solve_utf(
        instance: NetworkInstance,
        m: int,
        n: int,
        delta: float,
        cfg: SolverConfig | None = None,
        *,
        strict: bool = True,
) -> UtfSolution:
    """
    Evaluate f_n^m(delta): PU m's best utility while guaranteeing SU n ``delta``.

    The SU constraint binds at the optimum, so the relay power is a linear
    function of the access time and the problem is a search over ``t``.

    Args:
        instance: The market
        m: PU index
        n: SU index
        delta: Reservation utility of the SU (finite, nonnegative)
        cfg: Solver configuration (global config if None)
        strict: Raise on an empty domain instead of returning an infeasible solution

    Returns:
        UtfSolution with the optimal contract

    Raises:
        InfeasibleReservation: If ``delta`` is out of reach and ``strict`` is set
        ValidationError: If ``delta`` is negative or not finite
    """
    cfg = _solver_config(cfg)
    if not math.isfinite(delta) or delta < 0:
        raise ValidationError(f"must be finite and nonnegative, got {delta}", "delta")

    interval = feasible_time_interval(instance, m, n, delta, cfg)
    if interval is None:
        if strict:
            raise InfeasibleReservation(
                f"PU {m} cannot guarantee SU {n} a utility of {delta:.6g}"
            )
        return UtfSolution(pu_utility=-math.inf, exchange=None, feasible=False)

    a, b = reservation_line(instance, m, n, delta)
    pu = instance.pus[m]
    link = instance.link(m, n)

    def objective(t: FloatArray) -> FloatArray:
        p = np.clip(a * t - b, 0.0, cfg.p_max)
        return pu_utility(pu, link, instance.noise_power, p, t, instance.log_base)

    t_opt, value = grid_then_golden(objective, interval[0], interval[1], cfg.grid_points, cfg.refine_iters)
    p_opt = float(np.clip(a * t_opt - b, 0.0, cfg.p_max))

    return UtfSolution(
        pu_utility=value,
        exchange=ResourceExchange(relay_power=p_opt, access_time=t_opt),
        feasible=True,
    )


def _inverse_by_bisection(instance: NetworkInstance, m: int, n: int, pi: float, cfg: SolverConfig) -> float:
    def f(delta: float) -> float:
        return solve_utf(instance, m, n, delta, cfg, strict=False).pu_utility

    return bisect_decreasing(f, pi, 0.0, max_reservation(instance, m, n, cfg), cfg.bisection_iters)


def _inverse_by_dual_search(instance: NetworkInstance, m: int, n: int, pi: float, cfg: SolverConfig) -> float:
    """
    Maximize the SU utility over ``t`` with the relay power set to the least
    power that still leaves PU m the utility ``pi``.
    """
    pu = instance.pus[m]
    su = instance.sus[n]
    link = instance.link(m, n)
    sigma2 = instance.noise_power
    T = pu.coop_time
    t_cap = cfg.time_cap(T)

    kd = direct_snr(pu, sigma2)
    kn_max = float(relay_snr(cfg.p_max, link, sigma2))
    baseline = instance.non_cooperative_loss(m)
    full_rate = float(log_rate(1.0 + kd + kn_max, instance.log_base))
    exp_rate = np.exp2 if instance.log_base == "base2" else np.exp

    # Largest t at which even p_max still delivers pi
    if pi + baseline <= 0:
        t_hi = t_cap
    else:
        t_hi = min(t_cap, max(0.0, T * full_rate / (2.0 * (pi + baseline)) - T))

    g1, g2 = link.g1_sq, link.g2_sq

    def needed_power(t: FloatArray) -> FloatArray:
        with np.errstate(over="ignore"):
            kn = exp_rate(2.0 * (T + t) * (pi + baseline) / T) - 1.0 - kd
        kn = np.clip(kn, 0.0, kn_max)
        p = kn * (g1 + sigma2) * sigma2 / (g2 * (g1 - kn * sigma2))
        return np.clip(p, 0.0, cfg.p_max)  # type: ignore[no-any-return]

    def objective(t: FloatArray) -> FloatArray:
        return su_utility(su, m, T, needed_power(t), t, sigma2, instance.log_base)

    _, value = grid_then_golden(objective, 0.0, t_hi, cfg.grid_points, cfg.refine_iters)
    return max(0.0, value)


def inverse_utf(
        instance: NetworkInstance,
        m: int,
        n: int,
        pi: float,
        cfg: SolverConfig | None = None,
        *,
        method: InverseMethod = "bisection",
) -> float:
    """
    Evaluate g_n^m(pi): the most SU n can get while PU m keeps ``pi``.

    ``bisection`` inverts f directly on ``[0, max_reservation]``; ``dual``
    solves the mirrored one-dimensional problem and is much cheaper.

    Raises:
        TargetUnreachable: If ``pi`` exceeds f_n^m(0)
    """
    cfg = _solver_config(cfg)
    f0 = solve_utf(instance, m, n, 0.0, cfg).pu_utility

    if pi > f0 + cfg.tol:
        raise TargetUnreachable(
            f"PU {m} cannot reach utility {pi:.6g} with SU {n} (f(0) = {f0:.6g})"
        )
    if pi >= f0:
        return 0.0

    if method == "dual":
        return _inverse_by_dual_search(instance, m, n, pi, cfg)
    return _inverse_by_bisection(instance, m, n, pi, cfg)


# =============================================================================
# Transfer models: the f / g pair every equilibrium computation works against
# =============================================================================

class TransferModel(Protocol):
    """Utility transfer between every PU and SU of one instance."""

    instance: NetworkInstance

    def f(self, m: int, n: int, delta: float) -> float:
        """PU m's utility when SU n gets ``delta``; ``-inf`` if impossible."""
        ...

    def g(self, m: int, n: int, pi: float) -> float | None:
        """SU n's utility when PU m keeps ``pi``; None if ``pi`` is unreachable."""
        ...

    def exchange(self, m: int, n: int, delta: float) -> ResourceExchange | None:
        ...


class UtfModel:
    """Full-information transfer model with memoized solves."""

    def __init__(
            self,
            instance: NetworkInstance,
            cfg: SolverConfig | None = None,
            inverse_method: InverseMethod = "dual",
    ) -> None:
        self.instance = instance
        self.cfg = _solver_config(cfg)
        self.inverse_method = inverse_method
        self._solve = lru_cache(maxsize=None)(self._solve_uncached)
        self._inverse = lru_cache(maxsize=None)(self._inverse_uncached)

    def _solve_uncached(self, m: int, n: int, delta: float) -> UtfSolution:
        return solve_utf(self.instance, m, n, delta, self.cfg, strict=False)

    def _inverse_uncached(self, m: int, n: int, pi: float) -> float | None:
        try:
            return inverse_utf(self.instance, m, n, pi, self.cfg, method=self.inverse_method)
        except TargetUnreachable:
            return None

    def f(self, m: int, n: int, delta: float) -> float:
        return self._solve(m, n, max(0.0, float(delta))).pu_utility

    def g(self, m: int, n: int, pi: float) -> float | None:
        return self._inverse(m, n, float(pi))

    def exchange(self, m: int, n: int, delta: float) -> ResourceExchange | None:
        return self._solve(m, n, max(0.0, float(delta))).exchange


def utf_curve(
        instance: NetworkInstance,
        m: int,
        n: int,
        cfg: SolverConfig | None = None,
        points: int = 50,
) -> pd.DataFrame:
    """
    Sample f_n^m over ``[0, g_n^m(0)]`` for plotting the utility division.

    Returns:
        DataFrame with columns delta, pu_utility, relay_power, access_time
    """
    cfg = _solver_config(cfg)
    model = UtfModel(instance, cfg)
    upper = model.g(m, n, 0.0) or 0.0

    records = []
    for delta in np.linspace(0.0, upper, points):
        solution = solve_utf(instance, m, n, float(delta), cfg, strict=False)
        exchange = solution.exchange
        records.append({
            "delta": float(delta),
            "pu_utility": solution.pu_utility,
            "relay_power": exchange.relay_power if exchange else math.nan,
            "access_time": exchange.access_time if exchange else math.nan,
        })

    logger.debug(f"Sampled UTF curve of pair ({m}, {n}) on [0, {upper:.6g}]")
    return pd.DataFrame.from_records(records, columns=["delta", "pu_utility", "relay_power", "access_time"])
