"""Regular crystal graphs of types A, B and C.

A-crystals come from the crossing model (:func:`generate`) or from
recursive gluing (:func:`assemble`); B- and C-crystals are symmetric
extracts of palindromic A-crystals.
"""

from .assembler import Assembler, assemble
from .core import (Crystal, canonicalize, check_graded, edge_label, from_json, head_tail, isomorphic,
                   isomorphism, to_dot, to_json)
from .crossing import generate
from .errors import CrystalError, InputError, MalformedCrystalError, ResourceLimitError
from .extract import (base_parameter, complementarity, describe_B, describe_C, enumerate_B, enumerate_C,
                      extract, extract_B, extract_C, omega, omega_prime, worm_of_B, worm_of_C)
from .lattice import LatticeDecomposition, decompose, principal_lattice, zeta, zeta_inv
from .lowrank import sail_build, worm_apply, worm_generate
from .verifier import recheck, verify_A, verify_BC

__all__ = [
    "Assembler", "assemble", "Crystal", "canonicalize", "check_graded", "edge_label", "from_json",
    "head_tail", "isomorphic", "isomorphism", "to_dot", "to_json", "generate", "CrystalError",
    "InputError", "MalformedCrystalError", "ResourceLimitError", "base_parameter", "complementarity",
    "describe_B", "describe_C", "enumerate_B", "enumerate_C", "extract", "extract_B", "extract_C",
    "omega", "omega_prime", "worm_of_B", "worm_of_C", "LatticeDecomposition", "decompose",
    "principal_lattice", "zeta", "zeta_inv", "sail_build", "worm_apply", "worm_generate",
    "recheck", "verify_A", "verify_BC",
]
