"""Unentangled orthonormal qubit bases through hypercube edge colorings."""

from .coloring import (
    EdgeColoring,
    canonical_form,
    color_count,
    find_refinement,
    is_admissible,
    is_max_family,
    is_maximal,
)
from .constructors import cone, construct_max, doubling, fixture, generalized_bdf, minimal_coloring
from .cube import Edge, Hypercube
from .locc import extract_protocol, is_locc_distinguishable, simulate, wh_first_choices
from .uob import QubitRay, hat, recover_coloring, sample_assignment, synthesize, verify_uob

__version__ = "0.1.0"

__all__ = [
    "Edge", "Hypercube", "EdgeColoring", "QubitRay",
    "canonical_form", "color_count", "find_refinement", "is_admissible", "is_max_family", "is_maximal",
    "cone", "construct_max", "doubling", "fixture", "generalized_bdf", "minimal_coloring",
    "extract_protocol", "is_locc_distinguishable", "simulate", "wh_first_choices",
    "hat", "recover_coloring", "sample_assignment", "synthesize", "verify_uob",
]
