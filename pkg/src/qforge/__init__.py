"""Finite medial quandles: affine meshes, congruences, subdirect irreducibility, isomorphism."""

__version__ = "0.1.0"

from .abelian import (CapExceeded, FinAbGroup, GroupHom, LaurentModule, Subgroup, cyclic, hom_apply, image,
                      is_si_module, kernel, socle, submodules)
from .quandle import AxiomViolation, Quandle, is_medial, reductivity_degree, validate_quandle
from .mesh import AffineMesh, MeshViolation, canonical_mesh, sum_mesh, validate_mesh
from .congruence import Congruence, all_congruences, is_subdirectly_irreducible, monolith
from .construct import SiqSpec, SpecViolation, alexander, gallery, projection_quandle, siq
from .iso import are_homologous, cyclic_iso_criterion, quandle_isomorphic
from .config import RunConfig

__all__ = [
    "CapExceeded", "FinAbGroup", "GroupHom", "LaurentModule", "Subgroup", "cyclic", "hom_apply", "image",
    "is_si_module", "kernel", "socle", "submodules",
    "AxiomViolation", "Quandle", "is_medial", "reductivity_degree", "validate_quandle",
    "AffineMesh", "MeshViolation", "canonical_mesh", "sum_mesh", "validate_mesh",
    "Congruence", "all_congruences", "is_subdirectly_irreducible", "monolith",
    "SiqSpec", "SpecViolation", "alexander", "gallery", "projection_quandle", "siq",
    "are_homologous", "cyclic_iso_criterion", "quandle_isomorphic",
    "RunConfig",
]
