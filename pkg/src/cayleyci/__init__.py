"""Permutation groups, colored relational structures and non-CI witnesses.

The package builds Cayley ternary structures X and Y on Z_p x Z_2^d that are
isomorphic but not by a group automorphism, and checks an explicit structure
on Z_2^5 whose automorphism group holds two non-conjugate regular copies of
the group.
"""

from __future__ import annotations

from .autgrp import aut_group, brute_force_aut, k_closure, search_group_automorphism_iso
from .exceptions import BudgetExceeded, DegreeMismatch, FormatError, NotTransitive, PreconditionError
from .group import (
    BlockSystem,
    GroupSpec,
    PermGroup,
    all_block_systems,
    elements,
    minimal_block_system,
    schreier_sims,
    subgroup_conjugacy,
)
from .perm import Permutation, commutator, compose
from .relstruct import ColorRelStruct, ConnectionSet, apply_perm, cayley_structure, is_automorphism
from .witness import (
    WitnessBundle,
    WitnessSpec,
    build_Z,
    ci_check,
    theorem_main_construct,
    verify_witness,
)
from .z2five import load_counterexample, verify_counterexample

__version__ = "0.1.0"

__all__ = [
    "BlockSystem",
    "BudgetExceeded",
    "ColorRelStruct",
    "ConnectionSet",
    "DegreeMismatch",
    "FormatError",
    "GroupSpec",
    "NotTransitive",
    "PermGroup",
    "Permutation",
    "PreconditionError",
    "WitnessBundle",
    "WitnessSpec",
    "all_block_systems",
    "apply_perm",
    "aut_group",
    "brute_force_aut",
    "build_Z",
    "cayley_structure",
    "ci_check",
    "commutator",
    "compose",
    "elements",
    "is_automorphism",
    "k_closure",
    "load_counterexample",
    "minimal_block_system",
    "schreier_sims",
    "search_group_automorphism_iso",
    "subgroup_conjugacy",
    "theorem_main_construct",
    "verify_counterexample",
    "verify_witness",
]
