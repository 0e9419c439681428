"""Guess-based transfer curves for markets where PUs do not know SU types.

A PU that believes SU n has type ``h`` offers contracts with relay power
``p = h * t``, which would leave an SU of that type exactly indifferent. An
SU whose true type ``H`` exceeds ``h`` keeps ``t * (H - h) * A`` (scaled by
the SU's constant ``A``). Sweeping ``h`` downwards from ``H`` traces a
decreasing map from SU utility to PU utility.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from src.channel.model import FloatArray, NetworkInstance, ResourceExchange, pu_utility
from src.config import SolverConfig, get_config
from src.errors import DegenerateCurve
from src.utf.search import bisect_decreasing, grid_then_golden
from src.validators.input_validators import ValidationError

logger = logging.getLogger(__name__)

CONTRACT_BISECTION_ITERS = 40


@dataclass(frozen=True)
class GsSolution:
    """Best contract of PU m for a guessed SU type."""

    guess: float
    pu_utility: float
    exchange: ResourceExchange


def gs_utf(
        instance: NetworkInstance,
        m: int,
        n: int,
        guess: float,
        cfg: SolverConfig | None = None,
) -> GsSolution:
    """
    PU m's best contract ``p = max(0, t * guess)`` for SU n.

    A nonpositive guess allows ``p = 0``: access time offered for nothing.
    """
    cfg = cfg if cfg is not None else get_config().solver
    if not math.isfinite(guess):
        raise ValidationError(f"must be finite, got {guess}", "guess")

    pu = instance.pus[m]
    link = instance.link(m, n)
    t_hi = cfg.time_cap(pu.coop_time)
    if guess > 0:
        t_hi = min(t_hi, cfg.p_max / guess)

    def objective(t: FloatArray) -> FloatArray:
        p = np.maximum(0.0, t * guess)
        return pu_utility(pu, link, instance.noise_power, p, t, instance.log_base)

    t_opt, value = grid_then_golden(objective, 0.0, t_hi, cfg.grid_points, cfg.refine_iters)
    p_opt = min(cfg.p_max, max(0.0, t_opt * guess))

    return GsSolution(
        guess=guess,
        pu_utility=value,
        exchange=ResourceExchange(relay_power=p_opt, access_time=t_opt),
    )


@dataclass(frozen=True)
class GsCurve:
    """
    Sampled guess-based transfer curve of one pair.

    ``su_values`` is strictly increasing and ``pu_values`` strictly
    decreasing; ``guesses`` holds the type guess behind each sample and
    decreases along the table.
    """

    m: int
    n: int
    true_type: float
    guesses: FloatArray
    su_values: FloatArray
    pu_values: FloatArray

    @property
    def max_su_utility(self) -> float:
        return float(self.su_values[-1])

    def f(self, delta: float) -> float:
        """PU utility when the SU keeps ``delta``; ``-inf`` beyond the table."""
        if delta > self.max_su_utility:
            return -math.inf
        return float(np.interp(max(delta, 0.0), self.su_values, self.pu_values))

    def g(self, pi: float) -> float | None:
        """SU utility when the PU keeps ``pi``; None above f(0)."""
        if pi > self.pu_values[0]:
            return None
        if pi <= self.pu_values[-1]:
            return self.max_su_utility
        # np.interp needs increasing abscissae
        return float(np.interp(pi, self.pu_values[::-1], self.su_values[::-1]))

    def guess_for(self, delta: float) -> float:
        """Type guess whose contract leaves the SU ``delta``."""
        clipped = min(max(delta, 0.0), self.max_su_utility)
        return float(np.interp(clipped, self.su_values, self.guesses))


def gs_utf_curve(
        instance: NetworkInstance,
        m: int,
        n: int,
        cfg: SolverConfig | None = None,
) -> GsCurve:
    """
    Tabulate the guess-based transfer curve of pair (m, n).

    Guesses span ``[min(0, H) - 1, H]``. A guess above the true type ``H``
    is never sampled: its contracts leave the SU ``t * (H - h) * A < 0``
    for any ``t > 0``, so the SU refuses them and they cannot appear in a
    matching, whatever the top of the guess grid.

    Only samples that raise the SU utility and lower the PU utility
    relative to every sample with a larger guess are kept, which makes the
    map strictly decreasing.

    Raises:
        DegenerateCurve: If the true type is nonpositive or fewer than two samples remain
    """
    cfg = cfg if cfg is not None else get_config().solver
    true_type = instance.su_type(m, n)
    if true_type <= 0:
        raise DegenerateCurve(f"SU {n} has nonpositive type {true_type:.6g} on PU {m}'s band")

    guesses: list[float] = []
    su_values: list[float] = []
    pu_values: list[float] = []

    for guess in np.linspace(true_type, min(0.0, true_type) - 1.0, cfg.gs_samples):
        solution = gs_utf(instance, m, n, float(guess), cfg)
        delta = instance.su_utility(m, n, solution.exchange)
        if not guesses:
            # exact guess: the SU is left indifferent
            delta = max(0.0, delta)
        elif not (delta > su_values[-1] and solution.pu_utility < pu_values[-1]):
            continue
        guesses.append(float(guess))
        su_values.append(delta)
        pu_values.append(solution.pu_utility)

    if len(guesses) < 2:
        raise DegenerateCurve(
            f"guess-based curve of pair ({m}, {n}) has {len(guesses)} usable sample(s)"
        )

    logger.debug(f"Guess-based curve of pair ({m}, {n}): {len(guesses)} samples kept")
    return GsCurve(
        m=m,
        n=n,
        true_type=true_type,
        guesses=np.asarray(guesses),
        su_values=np.asarray(su_values),
        pu_values=np.asarray(pu_values),
    )


@dataclass(frozen=True)
class GuessState:
    """PU m's current guess about SU n's type, for every pair."""

    guesses: FloatArray

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.guesses)):
            raise ValidationError("guesses must be finite", "guesses")


class GuessUtfModel:
    """Transfer model built from guess-based curves.

    Pairs without a usable curve never cooperate: f is ``-inf`` and g is None.
    """

    def __init__(self, instance: NetworkInstance, cfg: SolverConfig | None = None) -> None:
        self.instance = instance
        self.cfg = cfg if cfg is not None else get_config().solver
        self._curve = lru_cache(maxsize=None)(self._build_curve)

    def _build_curve(self, m: int, n: int) -> GsCurve | None:
        try:
            return gs_utf_curve(self.instance, m, n, self.cfg)
        except DegenerateCurve as e:
            logger.debug(f"Pair ({m}, {n}) excluded: {e}")
            return None

    def curve(self, m: int, n: int) -> GsCurve | None:
        return self._curve(m, n)

    def f(self, m: int, n: int, delta: float) -> float:
        curve = self._curve(m, n)
        return -math.inf if curve is None else curve.f(delta)

    def g(self, m: int, n: int, pi: float) -> float | None:
        curve = self._curve(m, n)
        return None if curve is None else curve.g(pi)

    def exchange(self, m: int, n: int, delta: float) -> ResourceExchange | None:
        """
        Contract that leaves SU n ``delta``.

        The guess is bisected between the two table samples around ``delta``
        until the contract pays the SU ``delta``.
        """
        curve = self._curve(m, n)
        if curve is None or delta > curve.max_su_utility:
            return None
        delta = max(delta, 0.0)
        i = int(np.searchsorted(curve.su_values, delta))
        if i == 0 or curve.su_values[min(i, len(curve.su_values) - 1)] == delta:
            return gs_utf(self.instance, m, n, float(curve.guesses[i]), self.cfg).exchange

        def su_at(guess: float) -> float:
            solution = gs_utf(self.instance, m, n, guess, self.cfg)
            return self.instance.su_utility(m, n, solution.exchange)

        # su_values[i - 1] < delta < su_values[i]; SU utility falls as the guess rises
        guess = bisect_decreasing(
            su_at, delta, float(curve.guesses[i]), float(curve.guesses[i - 1]), CONTRACT_BISECTION_ITERS
        )
        return gs_utf(self.instance, m, n, guess, self.cfg).exchange

    def guess_state(self, offers: FloatArray | None = None) -> GuessState:
        """
        Guesses implied by PU utilities ``offers[m, n]``; true types where no
        offer was made, zero for pairs without a curve.
        """
        M, N = self.instance.num_pus, self.instance.num_sus
        guesses = np.zeros((M, N))
        for m in range(M):
            for n in range(N):
                curve = self._curve(m, n)
                if curve is None:
                    continue
                if offers is None or not math.isfinite(offers[m, n]):
                    guesses[m, n] = curve.true_type
                else:
                    delta = curve.g(float(offers[m, n]))
                    guesses[m, n] = curve.guess_for(delta if delta is not None else 0.0)
        return GuessState(guesses=guesses)
