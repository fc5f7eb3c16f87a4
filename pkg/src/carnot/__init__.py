"""Exact-arithmetic engine for differential forms on Carnot groups.

Builds, from rational structure constants alone: the exterior algebra of
the adapted coframe, polynomial-coefficient forms with the weight
bigrading, the split differential and its multicomplex identities, the
Rumin complex operators, and the weight-filtration spectral sequence,
verifying the structural identities relating them as exact statements in
rational linear algebra.
"""

from .lie_core import (GroupSpecError, StratifiedAlgebra, ValidationReport,
                       hausdorff_dimension, parse_group_spec,
                       serialize_group_spec, validate_stratification)
from .exterior import (Covector, MixedWeight, WeightBlock, ce_differential,
                       covector_basis, covector_str, inner_product, wedge,
                       weight, weight_blocks, weight_split)
from .poly_coeff import (GroupLaw, LIVectorField, PolyScalar,
                         StepOverflowError, apply_field, group_law,
                         left_invariant_fields, poly_str)
from .derham import (BlockOperator, MulticomplexReport, PolyForm, Slice,
                     SliceTooLargeError, d_component, d_full, filtration_basis,
                     form_str, multicomplex_check)
from .rumin import (RuminOperators, SliceOps, d0_pinv, e0_basis,
                    neumann_inverse, proj_e0, rumin_differential)
from .spectral import (SpectralPage, ZSpace, b_space, blockwise_page_dims,
                       brute_cohomology, filtered_page_dims,
                       infinity_page_dims, page, page_computer, partial_r,
                       rumin_vs_pages, z_space)

__version__ = "0.1.0"

__all__ = [
    "BlockOperator", "Covector", "GroupLaw", "GroupSpecError",
    "LIVectorField", "MixedWeight", "MulticomplexReport", "PolyForm",
    "PolyScalar", "RuminOperators", "Slice", "SliceOps",
    "SliceTooLargeError", "SpectralPage", "StepOverflowError",
    "StratifiedAlgebra", "ValidationReport", "WeightBlock", "ZSpace",
    "apply_field", "b_space", "blockwise_page_dims", "brute_cohomology",
    "ce_differential", "covector_basis", "covector_str", "d0_pinv",
    "d_component", "d_full", "e0_basis", "filtered_page_dims",
    "filtration_basis", "form_str", "group_law", "hausdorff_dimension",
    "infinity_page_dims", "inner_product", "left_invariant_fields",
    "multicomplex_check", "neumann_inverse", "page", "page_computer",
    "parse_group_spec", "partial_r", "poly_str", "proj_e0",
    "rumin_differential", "rumin_vs_pages", "serialize_group_spec",
    "validate_stratification", "wedge", "weight", "weight_blocks",
    "weight_split", "z_space",
]
