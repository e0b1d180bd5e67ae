"""Étale cover sheaves, the fiber functor and the Galois-category checks."""

from .cover import (
    EtaleCover,
    ProductCover,
    TensorCover,
    as_cover,
    constant_rank,
    degree,
    etale_cover_report,
    extend_scalars,
    global_algebra,
    is_etale_cover,
    local_ranks,
    product_cover,
    pullback_cover,
    pushforward_cover,
    structure_cover,
    tensor_cover,
    tensor_over_base,
    trivial_cover,
    zero_cover,
)
from .fibers import FiberSet, fib, fib_map
from .galois import AXIOMS, GaloisReport, galois_axioms_report, galois_group, is_connected_cover, is_galois
from .morphisms import (
    AutGroup,
    CoverMorphism,
    Factorization,
    Quotient,
    aut_group,
    hom_set,
    identity_morphism,
    image_factorization,
    is_epi,
    is_mono,
    point_homs,
    quotient_by_group,
    structure_morphism,
)
from .trivial import (
    DiagonalSplitting,
    TrivializationCertificate,
    index_map_morphism,
    split_diagonal,
    trivialize,
    verify_certificate,
)
