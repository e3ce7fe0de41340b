"""Finite flows, lifting properties and weak factorization systems on finite sets."""
from .finset import (FinSet, MapClass, SetMap, Tag, classify_map, enumerate_universe, is_retract, map_C,
                     map_C_plus, map_R)
from .flows import (BudgetExceeded, Flow, FlowMorphism, FlowPresentation, InfinitePathSet, concat_globes,
                    directed_segment, enumerate_morphisms, glob, materialize, phi)
from .lifting import LiftingSquare, NonCommutingSquare, find_filler, has_llp, llp_members, rlp_members
from .colimits import codiagonal_construction, coproduct, mediating_morphism, pushout
from .wfs import (canonical_factorization, cof_membership, soa_factorize, verify_model_structure,
                  verify_wfs)
from .dihomotopy import analyze, counterexample_suite, is_discrete_weq

__version__ = "0.1.0"

__all__ = [
    "FinSet", "MapClass", "SetMap", "Tag", "classify_map", "enumerate_universe", "is_retract", "map_C",
    "map_C_plus", "map_R",
    "BudgetExceeded", "Flow", "FlowMorphism", "FlowPresentation", "InfinitePathSet", "concat_globes",
    "directed_segment", "enumerate_morphisms", "glob", "materialize", "phi",
    "LiftingSquare", "NonCommutingSquare", "find_filler", "has_llp", "llp_members", "rlp_members",
    "codiagonal_construction", "coproduct", "mediating_morphism", "pushout",
    "canonical_factorization", "cof_membership", "soa_factorize", "verify_model_structure", "verify_wfs",
    "analyze", "counterexample_suite", "is_discrete_weq",
]
