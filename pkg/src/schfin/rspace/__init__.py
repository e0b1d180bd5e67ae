"""Ringed finite posets, their sheaves, cohomology and structural predicates."""

from .cohomology import CochainComplex, Cohomology, cohomology, cohomology_dims, sheaf_complex, standard_complex, structure_complex
from .constructions import (
    FiberProduct,
    SteinFactorization,
    collapse,
    cylinder,
    fiber_product,
    is_flat_immersion,
    open_inclusion,
    open_pushforward,
    pushforward_sheaf,
    pushforward_space,
    relspec,
    sheaf_from_module,
    stein_factorization,
)
from .predicates import (
    AffineReport,
    affine_report,
    is_affine,
    is_affine_morphism,
    is_finite_space,
    is_finite_type,
    is_qc_isomorphism,
    is_qcoh_algebra,
    is_quasi_coherent,
    is_schematic_morphism,
    is_schematic_space,
    morphism_report,
    pushforward_map,
    schematic_report,
)
from .sections import Sections, canonical_map, global_to_stalks, section_algebra, sections, sections_module
from .space import (
    Module,
    ModuleSheaf,
    QcohAlgebra,
    Report,
    RingedPoset,
    SpaceMorphism,
    identity_morphism,
    module_tensor,
    point_space,
    validate_space,
)
