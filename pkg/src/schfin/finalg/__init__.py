"""Exact kernel for finite-dimensional commutative F_p-algebras."""

from .algebra import (
    Algebra,
    AlgebraMap,
    Ideal,
    TensorProduct,
    change_basis,
    corner,
    identity,
    ideal_generated,
    mk_algebra,
    mk_map,
    multiplication_map,
    poly_algebra,
    prime_field,
    product,
    product_map,
    quotient,
    subalgebra,
    tensor_map,
    tensor_over,
    tensor_product_map,
    zero_algebra,
)
from .omega import OmegaTower, cycle_type, embeddings, embeddings_into_omega
from .predicates import (
    etale_decompose,
    free_rank,
    ideals,
    is_epimorphism,
    is_etale_map,
    is_faithfully_flat,
    is_flat,
    is_flat_oracle,
)
from .structure import (
    FiniteFieldRep,
    LocalDecomposition,
    field_rep,
    idempotents,
    idempotents_by_enumeration,
    idempotents_by_splitting,
    is_reduced,
    local_decomposition,
    minimal_polynomial,
    nilradical,
    nilradical_by_enumeration,
    nilradical_by_trace_form,
    preimage_indices,
    primitive_idempotents,
    residue_field,
    residue_field_at,
    spec,
)
