"""Flatness, faithful flatness, epimorphisms and étale maps."""

import numpy as np

from .. import linalg as la
from ..errors import NotEtale, SizeBound
from .algebra import tensor_over
from .structure import (
    ENUMERATION_BOUND,
    is_reduced,
    local_decomposition,
    nilradical,
    residue_field_at,
    spec,
)


def _span_dim(vectors, p, n):
    if not vectors:
        return 0
    return la.rank(np.array(vectors, dtype=np.int64).reshape(-1, n), p)


def local_ranks(f):
    """For each local factor R_i of the source, (dim R_i, dim k_i, dim B_i, dim B_i/m_i B_i).

    B_i = f(e_i) B and m_i is the maximal ideal of R_i.
    """
    r, b = f.src, f.dst
    p = r.p
    dec = local_decomposition(r)
    nil = nilradical(r).basis
    out = []
    for e in dec.idempotents:
        dim_ri = la.rank(r.lmat(e), p)
        mi = list(r.products([e], nil)[0]) if len(nil) else []
        dim_mi = _span_dim(mi, p, r.dim)
        fe = f(e)
        dim_bi = la.rank(b.lmat(fe), p) if b.dim else 0
        mb = list(b.products([f(m) for m in mi], la.eye(b.dim)).reshape(-1, b.dim)) if mi and b.dim else []
        dim_mbi = _span_dim(mb, p, b.dim)
        out.append((dim_ri, dim_ri - dim_mi, dim_bi, dim_bi - dim_mbi))
    return out


def is_flat(f):
    """Flatness via local freeness over each local factor of the source.

    B_i is free over the local ring R_i iff dim B_i = mu * dim R_i where
    mu = dim(B_i/m_i B_i)/dim k_i is the minimal number of generators.
    """
    for dim_ri, dim_k, dim_bi, dim_fib in local_ranks(f):
        if dim_bi * dim_k != dim_fib * dim_ri:
            return False
    return True


def free_rank(f):
    """Rank of the target over each local factor of the source (None if not free)."""
    out = []
    for dim_ri, dim_k, dim_bi, dim_fib in local_ranks(f):
        if dim_bi * dim_k != dim_fib * dim_ri:
            out.append(None)
        else:
            out.append(dim_bi // dim_ri)
    return out


def ideals(r, bound=ENUMERATION_BOUND):
    """All ideals of r (canonical bases), by closing principal ideals under sums."""
    if r.p ** r.dim > bound:
        raise SizeBound("ideal enumeration bound exceeded")
    p, n = r.p, r.dim
    found = {}

    def add(basis):
        k = (basis.shape, basis.tobytes())
        if k not in found:
            found[k] = basis
            return True
        return False

    principal = []
    for x in r.elements():
        gens = r.lmat(x).T
        bas = la.row_basis(gens, p, n)
        if add(bas):
            principal.append(bas)
    frontier = list(found.values())
    while frontier:
        new = []
        for a in frontier:
            for b in principal:
                s = la.row_basis(np.vstack([a, b]), p, n)
                if add(s):
                    new.append(s)
        frontier = new
    return sorted(found.values(), key=lambda b: (len(b), b.tobytes()))


def ideal_tensor_injective(f, ideal_basis):
    """Is I (x)_R B -> B injective?  Computed by dimensions."""
    r, b = f.src, f.dst
    p = r.p
    basis, piv = (la.rref(ideal_basis, p) if len(ideal_basis) else (la.zeros(0, r.dim), []))
    di = len(basis)
    if di == 0 or b.dim == 0:
        return True
    n = di * b.dim
    rels = []
    ib = la.eye(b.dim)
    for k in range(r.dim):
        # action of e_k on I in the echelon coordinates
        act = np.array([r.mult(r.basis(k), v)[piv] for v in basis], dtype=np.int64).T % p
        lb = b.lmat(f(r.basis(k)))
        rels.append(((np.kron(act, ib) - np.kron(la.eye(di), lb)) % p).T)
    rel_rank = la.rank(np.vstack(rels), p)
    # image of x (x) b_j is f(x) b_j
    img = [b.mult(f(v), b.basis(j)) for v in basis for j in range(b.dim)]
    img_rank = _span_dim(img, p, b.dim)
    return n - rel_rank == img_rank


def is_flat_oracle(f, bound=ENUMERATION_BOUND):
    """Flatness by the ideal criterion: I (x) B -> B injective for every ideal I."""
    return all(ideal_tensor_injective(f, i) for i in ideals(f.src, bound))


def is_faithfully_flat(f):
    if not is_flat(f):
        return False
    return all(dim_fib > 0 for _, _, _, dim_fib in local_ranks(f))


def is_epimorphism(f):
    """Multiplication B (x)_A B -> B is bijective; it is always onto."""
    return tensor_over(f, f).algebra.dim == f.dst.dim


def fiber_algebras(f):
    """B (x)_R k(q) for each prime q of the source."""
    out = []
    for i in range(len(spec(f.src))):
        _, q = residue_field_at(f.src, i)
        out.append(tensor_over(f, q).algebra)
    return out


def is_etale_map(f):
    if not is_flat(f):
        return False
    return all(is_reduced(t) for t in fiber_algebras(f))


def etale_decompose(structure):
    """Degrees over a field k of the field factors of an étale k-algebra.

    ``structure`` is the map k -> E.
    """
    k, e = structure.src, structure.dst
    if not is_reduced(e):
        raise NotEtale("algebra is not reduced over the field")
    return sorted(f.dim // k.dim for f in local_decomposition(e).factors)
