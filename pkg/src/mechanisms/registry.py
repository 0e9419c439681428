"""Name -> mechanism lookup used by the CLI and the sweep."""

from __future__ import annotations

import logging

from src.channel.model import NetworkInstance
from src.config import SolverConfig
from src.equilibrium.matching import pu_utility_of
from src.equilibrium.oracle import brute_force_equilibria, pu_optimal_member
from src.errors import NoSolution
from src.mechanisms.auction import GDac, GRdac, GsgRdac
from src.mechanisms.base import BaseMechanism, MechanismTrace
from src.utf.solver import UtfModel
from src.validators.input_validators import ValidationError

logger = logging.getLogger(__name__)


class BruteForce(BaseMechanism):
    """Exhaustive search; returns the equilibrium best for the PUs."""

    name = "brute_force"

    def run(self, instance: NetworkInstance) -> MechanismTrace:
        model = UtfModel(instance, self.cfg)
        equilibria = brute_force_equilibria(model, self.cfg)
        if not equilibria:
            raise NoSolution("exhaustive search found no equilibrium")

        best = pu_optimal_member(model, equilibria)
        logger.info(f"{self.name}: {len(equilibria)} equilibria enumerated")
        return MechanismTrace(
            mechanism=self.name,
            rounds=0,
            matching=best,
            certified=True,
            pu_utilities={m: pu_utility_of(model, best, m) for m in range(instance.num_pus)},
        )


MECHANISMS: dict[str, type[BaseMechanism]] = {
    cls.name: cls for cls in (GDac, GRdac, GsgRdac, BruteForce)
}


def normalize_name(name: str) -> str:
    """``g-dac`` and ``g_dac`` name the same mechanism."""
    return name.strip().lower().replace("-", "_")


def get_mechanism(name: str, epsilon: float = 0.01, cfg: SolverConfig | None = None) -> BaseMechanism:
    """
    Instantiate a mechanism by name.

    Raises:
        ValidationError: If no mechanism has that name
    """
    key = normalize_name(name)
    if key not in MECHANISMS:
        raise ValidationError(
            f"unknown mechanism '{name}', choose from {sorted(MECHANISMS)}",
            "mechanism",
        )
    return MECHANISMS[key](epsilon, cfg)
