"""Splitting the diagonal and the constructive trivialization of covers."""

import numpy as np

from .. import linalg as la
from ..errors import NotEtale, NotWellConnected, SizeBound
from ..finalg import AlgebraMap, identity, is_faithfully_flat, multiplication_map, product, tensor_map, tensor_over, tensor_product_map
from ..pwconn import is_well_connected, wc_components_algebra
from ..rspace import QcohAlgebra
from .cover import EtaleCover, constant_rank, structure_cover, tensor_over_base
from .morphisms import CoverMorphism, _corner_cover, _idempotent_generator, hom_set

TRIVIALIZE_BOUND = 4096


class DiagonalSplitting:
    """A (x)_O A = A x C with C an étale cover of (X, A).

    ``idempotent[x]`` generates the kernel of multiplication at x,
    ``iso[x]`` is the isomorphism A_x (x) A_x -> A_x x C_x and ``other[x]``
    the map A_x -> C_x through the right factor.
    """

    __slots__ = ("idempotent", "tensor", "iso", "complement", "other")

    def __init__(self, idempotent, tensor, iso, complement, other):
        self.idempotent = idempotent
        self.tensor = tensor
        self.iso = iso
        self.complement = complement
        self.other = other


def split_diagonal(cover, check=True):
    X = cover.base
    tens = {x: tensor_over(cover.structure(x), cover.structure(x)) for x in X.points}
    fiber = {x: tens[x].algebra for x in X.points}
    res = {(a, b): tensor_map(tens[a], tens[b], cover.sheaf.res[(a, b)], cover.sheaf.res[(a, b)]) for a, b in X.poset.hasse}
    # the tensor square as an algebra over (X, A) through the left factor
    top = cover.sheaf.as_space()
    sq = EtaleCover(top, QcohAlgebra(top, fiber, {x: tens[x].left for x in X.points}, res, check=False), check=False)
    idem, mults = {}, {}
    for x in X.points:
        mults[x] = multiplication_map(tens[x])
        t = fiber[x]
        idem[x] = _idempotent_generator(t, mults[x].kernel().basis) if t.dim else t.zero()
    comp, proj, _ = _corner_cover(sq, idem)
    if check:
        comp = EtaleCover(top, comp.sheaf, check=True)
    iso, other = {}, {}
    for x in X.points:
        prod, _ = product(cover.fiber(x), comp.fiber(x))
        iso[x] = AlgebraMap(fiber[x], prod, np.vstack([mults[x].mat, proj.maps[x].mat]), check=False)
        if not iso[x].is_iso():
            raise NotEtale("tensor square does not split off the diagonal", where=x)
        other[x] = proj.maps[x].compose(tens[x].right)
    return DiagonalSplitting(idem, sq, iso, comp, other)


class TrivializationCertificate:
    """B finite faithfully flat with A (x)_O B = B^n through the sections ``sections``.

    ``iso[x]`` is the matrix of A_x (x) B_x -> B_x^n, a (x) b -> (s_k(a) b)_k,
    in the basis of ``tensors[x]``.
    """

    __slots__ = ("cover", "covering", "n", "sections", "tensors", "iso")

    def __init__(self, cover, covering, n, sections, tensors, iso):
        self.cover = cover
        self.covering = covering
        self.n = n
        self.sections = sections
        self.tensors = tensors
        self.iso = iso


def _split_sections(cover):
    """n sections A -> O assembling to an isomorphism, if they exist."""
    n = constant_rank(cover)
    o = structure_cover(cover.base)
    homs = hom_set(cover, o)
    if len(homs) != n:
        return None
    for x in cover.points:
        mat = np.vstack([h.maps[x].mat for h in homs]) if homs else la.zeros(0, cover.fiber(x).dim)
        if mat.shape[0] != mat.shape[1] or la.rank(mat, cover.p) != mat.shape[0]:
            return None
    return homs


def _by_components(cover, bound):
    """Trivialize each clopen part separately and tensor the coverings together.

    Returns None unless the cover has several parts, each of constant positive rank.
    """
    X = cover.base
    comps = wc_components_algebra(X, cover.sheaf, check=False)
    if len(comps.parts) < 2:
        return None
    parts = [EtaleCover(X, part, check=False) for part in comps.parts]
    if any(not constant_rank(c) for c in parts):
        return None
    b, sects, offset = structure_cover(X), [], {x: 0 for x in X.points}
    for c in parts:
        proj = {}
        for x in X.points:
            d = c.fiber(x).dim
            rows = comps.isomorphism[x].mat[offset[x]:offset[x] + d]
            proj[x] = AlgebraMap(cover.fiber(x), c.fiber(x), rows, check=False)
            offset[x] += d
        bj, sj = _trivialize(c, bound)
        t = tensor_over_base(b, bj)
        sects = [{x: t.left.maps[x].compose(s[x]) for x in X.points} for s in sects]
        sects += [{x: t.right.maps[x].compose(s[x]).compose(proj[x]) for x in X.points} for s in sj]
        b = t.cover
    return b, sects


def _trivialize(cover, bound):
    """(B, sections A -> B) with B an algebra over the base of ``cover``."""
    X = cover.base
    n = constant_rank(cover)
    if n is None:
        raise NotEtale("rank is not constant")
    if n == 0:
        return structure_cover(X), []
    homs = _split_sections(cover)
    if homs is not None:
        return structure_cover(X), [{x: h.maps[x] for x in X.points} for h in homs]
    if max(cover.fiber(x).dim for x in X.points) > bound:
        raise SizeBound(f"covering algebra exceeds dimension {bound}")
    parts = _by_components(cover, bound)
    if parts is not None:
        return parts
    split = split_diagonal(cover, check=False)
    inner, sects = _trivialize(split.complement, bound)
    # inner lives over (X, A); view it over X
    structure = {x: inner.structure(x).compose(cover.structure(x)) for x in X.points}
    b = EtaleCover(X, QcohAlgebra(X, dict(inner.sheaf.fiber), structure, dict(inner.sheaf.res), check=False), check=False)
    out = [dict(inner.sheaf.structure)]
    for s in sects:
        out.append({x: s[x].compose(split.other[x]) for x in X.points})
    return b, out


def trivialize(cover, check=True, bound=TRIVIALIZE_BOUND):
    """Certificate that a cover of a well-connected space becomes trivial after a covering."""
    if check and not is_well_connected(cover.base):
        raise NotWellConnected("trivialization needs a well-connected base")
    b, sects = _trivialize(cover, bound)
    X = cover.base
    tensors, iso = {}, {}
    for x in X.points:
        t = tensor_over(cover.structure(x), b.structure(x))
        tensors[x] = t
        ident = identity(b.fiber(x))
        rows = [tensor_product_map(t, s[x], ident).mat for s in sects]
        iso[x] = np.vstack(rows) if rows else la.zeros(0, t.algebra.dim)
    cert = TrivializationCertificate(cover, b, len(sects), sects, tensors, iso)
    if check and not verify_certificate(cert):
        raise NotEtale("trivialization failed to verify")
    return cert


def verify_certificate(cert):
    """Independent check: sections are morphisms, iso matrices are invertible and B is a covering."""
    A, B = cert.cover, cert.covering
    p = A.p
    for s in cert.sections:
        m = CoverMorphism(A, B, s, check=False)
        if m.defect() is not None:
            return False
        for x in A.points:
            try:
                AlgebraMap(A.fiber(x), B.fiber(x), s[x].mat)
            except ValueError:
                return False
    for x in A.points:
        t = tensor_over(A.structure(x), B.structure(x))
        if t.algebra.dim != B.fiber(x).dim * cert.n:
            return False
        # recompute the map from scratch on the representatives of the tensor basis
        cols = []
        for k in range(t.sect.shape[1]):
            idx = int(np.nonzero(t.sect[:, k])[0][0])
            i, j = divmod(idx, B.fiber(x).dim)
            col = [B.fiber(x).mult(s[x](A.fiber(x).basis(i)), B.fiber(x).basis(j)) for s in cert.sections]
            cols.append(np.concatenate(col) if col else la.zeros(1, 0)[0])
        mat = np.array(cols, dtype=np.int64).T.reshape(B.fiber(x).dim * cert.n, t.algebra.dim) % p
        if mat.shape[0] != mat.shape[1] or la.rank(mat, p) != mat.shape[0]:
            return False
        if not is_faithfully_flat(B.structure(x)):
            return False
    return True


def index_map_morphism(src, dst, phi):
    """O^m -> O^n for trivial covers, with factor j of the target read off factor phi[j] of the source."""
    maps = {}
    for x in src.points:
        d = src.base.stalk[x].dim
        mat = la.zeros(d * len(phi), src.fiber(x).dim)
        for j, i in enumerate(phi):
            mat[j * d:(j + 1) * d, i * d:(i + 1) * d] = la.eye(d)
        maps[x] = AlgebraMap(src.fiber(x), dst.fiber(x), mat, check=False)
    return CoverMorphism(src, dst, maps, check=False)
