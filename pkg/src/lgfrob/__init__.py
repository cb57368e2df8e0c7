"""Frobenius-type structures and Frobenius manifolds from convenient nondegenerate Laurent polynomials."""

from .hm import (FrobeniusGerm, GenerationFailure, HMDeformation, check_wdvv, compare_structures,
                 frobenius_manifold_from_deformation, germ_to_json, hm_extend, universal_choice,
                 universal_good_deformation, unit_direction_choice)
from .jacobi import JacobianIdeal, JacobiBasis, NewtonReducer, monomial_basis, multiplication_matrix, normal_form, \
    residue_pairing, spectrum
from .laurent import LaurentPoly, ParseError, deformation, format_poly, parse_laurent, specialize
from .newton import NewtonPolyhedron, NotConvenient, is_convenient, is_nondegenerate, milnor_number, \
    newton_degree, newton_polyhedron, subdiagram_monomials
from .oracle import graded_dim_bruteforce, jacobi_dim_bruteforce, kontsevich_Nd
from .series import MatSeries, Truncation
from .structure import (FrobTypeStructure, SubdiagramDeformation, build_canonical_structure,
                        build_good_maximal_deformation, check_GC, check_GC_global, check_IC, classify_deformation,
                        is_good, period_map, primitive_map, restriction_check, translate_structure,
                        verify_structure_relations)

import types as _types

__all__ = [name for name, obj in dict(globals()).items()
           if not name.startswith("_") and not isinstance(obj, _types.ModuleType)]
