"""Finite p-groups of class two whose automorphisms are all central."""
from .constructions import TAGS, build, claim_sheet
from .group import GroupElement, PcPresentation, StandardSubgroup, lattice_relation
from .tat import TatCandidate, centralizer, check_tat, is_tat, search_tat, transport_tat

__all__ = [
    "TAGS", "build", "claim_sheet",
    "GroupElement", "PcPresentation", "StandardSubgroup", "lattice_relation",
    "TatCandidate", "centralizer", "check_tat", "is_tat", "search_tat", "transport_tat",
]
__version__ = "0.1.0"
