"""Ascending auctions over the utility transfer functions.

Proposers raise their offer to a receiver by one step of ``epsilon`` each
time that receiver rejects them. Receivers hold the best offer seen so
far and release it only for a strictly higher one.

* G-DAC: PUs propose SU utilities and value an offer ``d`` at ``f(d)``.
* G-RDAC: SUs propose PU utilities and value an offer ``x`` at ``g(x)``.
* GSG-RDAC: G-RDAC over guess-based transfer curves.

The auction ends at an epsilon-equilibrium. The returned matching is the
exact extreme equilibrium (PU-optimal for G-DAC, SU-optimal for the
reversed auctions) on the auction's assignment or on one next to it; the
raw auction matching is kept in the trace.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar, Literal

import numpy as np

from src.channel.model import NetworkInstance
from src.config import SolverConfig
from src.equilibrium.function_set import Side, best_equilibrium, nearest_equilibrium
from src.equilibrium.matching import Assignment, Matching, build_matching, pu_utility_of
from src.equilibrium.oracle import MAX_ORACLE_SIDE, enumerate_assignments
from src.errors import IterationCapExceeded, NoSolution
from src.mechanisms.base import BaseMechanism, MechanismEvent, MechanismTrace, OfferBook
from src.utf.guess import GuessUtfModel
from src.utf.solver import TransferModel, UtfModel

logger = logging.getLogger(__name__)

ValueFn = Callable[[int, int, float], float]


@dataclass
class AuctionOutcome:
    """Final state of an ascending auction."""

    held: dict[int, tuple[int, int]]  # receiver -> (proposer, offer level)
    levels: np.ndarray
    rounds: int
    events: list[MechanismEvent] = field(default_factory=list)


def round_cap(upper_offers: np.ndarray, epsilon: float, safety: int) -> int:
    """
    Rounds needed in the worst case: every offer climbs to its upper end,
    one rejection per round.
    """
    steps = np.ceil(np.maximum(upper_offers, 0.0) / epsilon)
    return int(steps.sum()) + upper_offers.size + safety


def ascending_auction(
        num_proposers: int,
        num_receivers: int,
        value: ValueFn,
        epsilon: float,
        cap: int,
        proposer_prefix: str,
        receiver_prefix: str,
) -> AuctionOutcome:
    """
    Run an ascending auction with deferred acceptance.

    Args:
        num_proposers: Number of proposers
        num_receivers: Number of receivers
        value: ``value(i, j, offer)`` is proposer i's own utility when
            receiver j accepts ``offer``
        epsilon: Offer increment
        cap: Maximum number of rounds
        proposer_prefix: Label prefix of proposers in the event log
        receiver_prefix: Label prefix of receivers in the event log

    Returns:
        AuctionOutcome with standing acceptances

    Raises:
        IterationCapExceeded: If offers still change after ``cap`` rounds
    """
    levels = np.zeros((num_proposers, num_receivers), dtype=np.int64)
    held: dict[int, tuple[int, int]] = {}
    events: list[MechanismEvent] = []

    for round_number in range(1, cap + 1):
        holding = {i for i, _ in held.values()}
        proposals: dict[int, list[int]] = {}

        for i in range(num_proposers):
            if i in holding:
                continue
            best_j, best_value = -1, -math.inf
            for j in range(num_receivers):
                candidate = value(i, j, levels[i, j] * epsilon)
                if candidate > best_value:
                    best_j, best_value = j, candidate
            if best_j < 0 or best_value < 0:
                events.append(MechanismEvent(round_number, f"{proposer_prefix}{i}", "abstain", "", best_value))
                continue
            proposals.setdefault(best_j, []).append(i)
            events.append(MechanismEvent(
                round_number, f"{proposer_prefix}{i}", "propose",
                f"{receiver_prefix}{best_j}", float(levels[i, best_j] * epsilon),
            ))

        rejections = 0
        for j in sorted(proposals):
            incumbent = [held[j][0]] if j in held else []
            candidates = incumbent + sorted(proposals[j])
            # highest offer wins; the incumbent, then the lowest index, wins ties
            winner = max(candidates, key=lambda i: (levels[i, j], i in incumbent, -i))
            held[j] = (winner, int(levels[winner, j]))
            events.append(MechanismEvent(
                round_number, f"{receiver_prefix}{j}", "hold",
                f"{proposer_prefix}{winner}", float(levels[winner, j] * epsilon),
            ))
            for loser in candidates:
                if loser == winner:
                    continue
                levels[loser, j] += 1
                rejections += 1
                events.append(MechanismEvent(
                    round_number, f"{receiver_prefix}{j}", "reject",
                    f"{proposer_prefix}{loser}", float(levels[loser, j] * epsilon),
                ))

        if rejections == 0:
            return AuctionOutcome(held=held, levels=levels, rounds=round_number, events=events)

    raise IterationCapExceeded(f"auction still running after {cap} rounds", rounds=cap)


class AscendingAuctionMechanism(BaseMechanism):
    """
    Shared driver of the three auctions.

    The auction's assignment is priced at the exact extreme equilibrium. When
    that assignment supports none, the assignments one move away are tried,
    then the auction is rerun with a step four times smaller, up to
    ``step_refinements`` times. Markets small enough for exhaustive search
    fall back to the best equilibrium over every assignment. Only then does
    the mechanism give up with NoSolution.
    """

    proposers: ClassVar[Literal["pu", "su"]] = "pu"
    optimal_for: ClassVar[Side] = "pu"

    def build_model(self, instance: NetworkInstance) -> TransferModel:
        return UtfModel(instance, self.cfg)

    def _raw_matching(self, model: TransferModel, outcome: AuctionOutcome, epsilon: float) -> Matching:
        deltas: dict[int, float] = {}
        pairs = []
        for receiver, (proposer, level) in outcome.held.items():
            offer = level * epsilon
            if self.proposers == "pu":
                m, n, delta = proposer, receiver, offer
            else:
                m, n = receiver, proposer
                delta = model.g(m, n, offer) or 0.0
            pairs.append((m, n))
            deltas[n] = delta
        return build_matching(model, Assignment(tuple(pairs)), deltas)

    def _auction(self, model: TransferModel, epsilon: float) -> AuctionOutcome:
        M, N = model.instance.num_pus, model.instance.num_sus

        if self.proposers == "pu":
            def value(i: int, j: int, offer: float) -> float:
                return model.f(i, j, offer)

            upper = np.array([[model.g(m, n, 0.0) or 0.0 for n in range(N)] for m in range(M)])
            shape, prefixes = (M, N), ("pu", "su")
        else:
            def value(i: int, j: int, offer: float) -> float:
                gain = model.g(j, i, offer)
                return -math.inf if gain is None else gain

            upper = np.array([[model.f(m, n, 0.0) for m in range(M)] for n in range(N)])
            upper = np.where(np.isfinite(upper), upper, 0.0)
            shape, prefixes = (N, M), ("su", "pu")

        cap = round_cap(upper.reshape(shape), epsilon, self.cfg.iteration_safety)
        return ascending_auction(shape[0], shape[1], value, epsilon, cap, *prefixes)

    def run(self, instance: NetworkInstance) -> MechanismTrace:
        model = self.build_model(instance)
        M, N = instance.num_pus, instance.num_sus
        epsilon = self.epsilon
        rounds = 0
        matching: Matching | None = None

        for attempt in range(self.cfg.step_refinements + 1):
            if attempt:
                epsilon /= 4.0
            outcome = self._auction(model, epsilon)
            rounds += outcome.rounds
            raw = self._raw_matching(model, outcome, epsilon)
            try:
                matching = nearest_equilibrium(model, raw.assignment, self.cfg, self.optimal_for)
                break
            except NoSolution as e:
                logger.info(f"{self.name}: no equilibrium near {raw.assignment.pairs} at step {epsilon:g} ({e})")

        if matching is None:
            if max(M, N) > MAX_ORACLE_SIDE:
                raise NoSolution(
                    f"{self.name}: no equilibrium near the auction outcome down to step {epsilon:g}"
                )
            matching = best_equilibrium(model, enumerate_assignments(M, N), self.cfg, self.optimal_for)

        if matching.assignment != raw.assignment:
            logger.info(f"{self.name}: auction assignment {raw.assignment.pairs} moved to {matching.assignment.pairs}")
        logger.info(f"{self.name}: {len(matching.assignment)} pair(s) after {rounds} round(s)")

        trace = MechanismTrace(
            mechanism=self.name,
            rounds=rounds,
            matching=matching,
            converged=True,
            raw_matching=raw,
            certified=True,
            pu_utilities={m: pu_utility_of(model, matching, m) for m in range(M)},
            events=outcome.events,
            offers=OfferBook(proposers=self.proposers, offers=outcome.levels * epsilon),
            epsilon=epsilon,
        )
        self.annotate(trace, model)
        return trace

    def annotate(self, trace: MechanismTrace, model: TransferModel) -> None:
        """Hook for mechanism-specific additions to the trace."""


class GDac(AscendingAuctionMechanism):
    """PU-proposing auction; reaches the PU-optimal equilibrium."""

    name = "g_dac"
    proposers = "pu"
    optimal_for = "pu"


class GRdac(AscendingAuctionMechanism):
    """SU-proposing auction; reaches the PU-robust (SU-optimal) equilibrium."""

    name = "g_rdac"
    proposers = "su"
    optimal_for = "su"


class GsgRdac(GRdac):
    """SU-proposing auction over guess-based curves, for unknown SU types."""

    name = "gsg_rdac"

    def build_model(self, instance: NetworkInstance) -> TransferModel:
        return GuessUtfModel(instance, self.cfg)

    def annotate(self, trace: MechanismTrace, model: TransferModel) -> None:
        if isinstance(model, GuessUtfModel) and trace.offers is not None:
            # offers are indexed (SU, PU); guesses are indexed (PU, SU)
            trace.guesses = model.guess_state(trace.offers.offers.T)


def g_dac(instance: NetworkInstance, epsilon: float = 0.01, cfg: SolverConfig | None = None) -> MechanismTrace:
    return GDac(epsilon, cfg).run(instance)


def g_rdac(instance: NetworkInstance, epsilon: float = 0.01, cfg: SolverConfig | None = None) -> MechanismTrace:
    return GRdac(epsilon, cfg).run(instance)


def gsg_rdac(instance: NetworkInstance, epsilon: float = 0.01, cfg: SolverConfig | None = None) -> MechanismTrace:
    return GsgRdac(epsilon, cfg).run(instance)
