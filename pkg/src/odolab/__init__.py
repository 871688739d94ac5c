"""
odolab - exact arithmetic in the topological full group of the q-adic odometer

Elements are stored as cocycles at a finite level; composition, inverses,
metrics, decompositions and constructions all run on exact integers and
dyadic (or q-adic) rationals.
"""

__version__ = "0.3.0"

# Core types
from .core.adic import AdicRational, ClopenSet
from .core.element import Element, identity, metric, odometer
from .core.permutation import Permutation, perm_metric
from .core.errors import OdolabError

# Main API
from .core.decompose import (
    belinskaya_decompose,
    disjoint_support_3coloring,
    involution_triple_decompose,
    split_equal_norm,
)
from .core.towers import (
    conj_distortion,
    generating_involution,
    kac_check,
    rho_embed,
    rokhlin_tower,
    zn_embedding,
)
from .core.genlab import assemble_and_recover, check_schedule, prime_cycle
from .core.concentration import exact_profile, mc_profile
from .loader import parse_clopen, parse_element, parse_permutation

__all__ = [
    # Core types
    "AdicRational",
    "ClopenSet",
    "Element",
    "Permutation",
    "OdolabError",
    # Elements
    "identity",
    "odometer",
    "metric",
    "perm_metric",
    # Decompositions
    "belinskaya_decompose",
    "disjoint_support_3coloring",
    "involution_triple_decompose",
    "split_equal_norm",
    # Towers
    "rokhlin_tower",
    "rho_embed",
    "kac_check",
    "generating_involution",
    "conj_distortion",
    "zn_embedding",
    # Constructions
    "prime_cycle",
    "assemble_and_recover",
    "check_schedule",
    # Concentration
    "exact_profile",
    "mc_profile",
    # Loading
    "parse_element",
    "parse_clopen",
    "parse_permutation",
]
