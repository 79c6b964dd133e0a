"""Exact TSP solvers and structural analysis tools for points in a narrow
horizontal strip."""

from .geometry import (
    DegenerateSeparatorError,
    Edge,
    Point,
    Separator,
    SizeError,
    StripError,
    StripInstance,
    Tour,
    edge_length,
    is_k_tonic,
    parse_instance,
    read_instance,
    separators,
    tonicity_at,
    tonicity_profile,
    tour_length,
    write_instance,
)
from .bitonic import bitonic_tsp
from .generators import GenSpec, generate
from .harness import campaign, counterexample_search
from .oracle import held_karp
from .stripdp import SolverConfig, narrow_rect_tsp
from .tonicity import reduce_tonicity

__all__ = [
    "GenSpec",
    "SolverConfig",
    "bitonic_tsp",
    "campaign",
    "counterexample_search",
    "generate",
    "held_karp",
    "narrow_rect_tsp",
    "reduce_tonicity",
    "DegenerateSeparatorError",
    "Edge",
    "Point",
    "Separator",
    "SizeError",
    "StripError",
    "StripInstance",
    "Tour",
    "edge_length",
    "is_k_tonic",
    "parse_instance",
    "read_instance",
    "separators",
    "tonicity_at",
    "tonicity_profile",
    "tour_length",
    "write_instance",
]

__version__ = "0.1.0"
