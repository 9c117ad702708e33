"""Exact equilibrium solver and degree-monotonicity prover for public-goods games on networks."""

from .equilibrium import EquilibriumSolution, br_dynamics, enumerate_pne, is_pne
from .game import GameSpec, make_profile
from .graph import Topology, TreeFamilyParams, canonical_tree, from_preset, gen_layered_tree
from .pneplus import is_pne_plus
from .prover import Certificate, decide_pne_plus
from .replay import replay_certificate

__all__ = [
    "Certificate", "EquilibriumSolution", "GameSpec", "Topology", "TreeFamilyParams",
    "br_dynamics", "canonical_tree", "decide_pne_plus", "enumerate_pne", "from_preset",
    "gen_layered_tree", "is_pne", "is_pne_plus", "make_profile", "replay_certificate",
]
