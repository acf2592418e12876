"""Set representations, decay laws and the definition language."""

from .dsl import ParseError, parse_spec, parse_specs, print_spec
from .laws import (Const, Cycle, DecayLaw, Diagonal, Factorial, Geometric, Harmonic,
                   Interleave, LimitTag, Linear, Power, Prefix, RatioMap, RatioTable,
                   SemanticError)
from .profile import DIV, ZERO, Profile
from .sets import (Bands, Block, ElaborationError, ExplicitBlocks, FiniteSet, GermSet, Origin,
                   Points, RatioGaps, SetSpec, Thicken, classify_origin, elaborate, gap_at)

__all__ = [
    "ParseError", "parse_spec", "parse_specs", "print_spec",
    "Const", "Cycle", "DecayLaw", "Diagonal", "Factorial", "Geometric", "Harmonic",
    "Interleave", "LimitTag", "Linear", "Power", "Prefix", "RatioMap", "RatioTable",
    "SemanticError", "DIV", "ZERO", "Profile",
    "Bands", "Block", "ElaborationError", "ExplicitBlocks", "FiniteSet", "GermSet", "Origin",
    "Points", "RatioGaps", "SetSpec", "Thicken", "classify_origin", "elaborate", "gap_at",
    "load",
]


def load(text: str):
    """Parse one definition and elaborate it."""
    return elaborate(parse_spec(text))
