"""Exact modules of the anticommutator spin algebra, with the Leonard pairs
and triples their generators form."""

from __future__ import annotations

from .algebra import Automorphism, all_automorphisms, check_relations_xy, check_relations_xyz
from .leonard import analyze_pair, fit_AW, verify_triple
from .linalg import Matrix
from .modules import ModuleRep, ModuleType, canonical_basis, classify_by_traces, construct, module_isomorphism
from .recognition import (
    counterexample_d2,
    extend_pair_to_triple,
    pair_isomorphism,
    recognize_pair,
    recognize_triple,
    triple_isomorphism,
)
from .scalars import ExtScalar, Q

__version__ = "0.1.0"

__all__ = [
    "Automorphism",
    "ExtScalar",
    "Matrix",
    "ModuleRep",
    "ModuleType",
    "Q",
    "all_automorphisms",
    "analyze_pair",
    "canonical_basis",
    "check_relations_xy",
    "check_relations_xyz",
    "classify_by_traces",
    "construct",
    "counterexample_d2",
    "extend_pair_to_triple",
    "fit_AW",
    "module_isomorphism",
    "pair_isomorphism",
    "recognize_pair",
    "recognize_triple",
    "triple_isomorphism",
    "verify_triple",
]
