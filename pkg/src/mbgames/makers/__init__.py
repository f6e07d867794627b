"""Maker-side strategies."""

from .builder import ExpanderBuilder
from .common import GreedyMatchingStage, ReserveGuard, SetupError, pick_reserve
from .connectivity import ConnectivityMaker
from .constants import StrategyConstants
from .hamilton import HamiltonMaker
from .matching import PerfectMatchingMaker, verify_matching_certificate

__all__ = [
    "ConnectivityMaker",
    "ExpanderBuilder",
    "GreedyMatchingStage",
    "HamiltonMaker",
    "PerfectMatchingMaker",
    "ReserveGuard",
    "SetupError",
    "StrategyConstants",
    "pick_reserve",
    "verify_matching_certificate",
]
