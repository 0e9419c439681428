"""Market mechanisms: ascending auctions and fixed-preference deferred acceptance."""

from src.mechanisms.base import (
    BaseMechanism,
    MechanismEvent,
    MechanismResult,
    MechanismTrace,
    OfferBook,
)
from src.mechanisms.auction import (
    AscendingAuctionMechanism,
    GDac,
    GRdac,
    GsgRdac,
    ascending_auction,
    g_dac,
    g_rdac,
    gsg_rdac,
)
from src.mechanisms.fixed import (
    EXAMPLE_ONE_INTERMEDIATE,
    EXAMPLE_ONE_PU_OPTIMAL,
    EXAMPLE_ONE_SU_OPTIMAL,
    PreferenceLists,
    SuReportStrategy,
    blocking_pairs_fixed,
    dac_fixed,
    dac_with_reports,
    deferred_acceptance,
    enumerate_stable_assignments,
    example_one_preferences,
    is_stable,
    rdac_fixed,
)
from src.mechanisms.registry import MECHANISMS, BruteForce, get_mechanism, normalize_name

__all__ = [
    "BaseMechanism",
    "MechanismEvent",
    "MechanismResult",
    "MechanismTrace",
    "OfferBook",
    "AscendingAuctionMechanism",
    "GDac",
    "GRdac",
    "GsgRdac",
    "ascending_auction",
    "g_dac",
    "g_rdac",
    "gsg_rdac",
    "EXAMPLE_ONE_INTERMEDIATE",
    "EXAMPLE_ONE_PU_OPTIMAL",
    "EXAMPLE_ONE_SU_OPTIMAL",
    "PreferenceLists",
    "SuReportStrategy",
    "blocking_pairs_fixed",
    "dac_fixed",
    "dac_with_reports",
    "deferred_acceptance",
    "enumerate_stable_assignments",
    "example_one_preferences",
    "is_stable",
    "rdac_fixed",
    "MECHANISMS",
    "BruteForce",
    "get_mechanism",
    "normalize_name",
]
