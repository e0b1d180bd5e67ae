"""Étale cover sheaves: verification, degree and the basic constructions."""

from functools import lru_cache

import numpy as np

from .. import linalg as la
from ..errors import BadShape, NotEtale, NotPwConnected, NotQcoh
from ..finalg import (
    AlgebraMap,
    free_rank,
    identity,
    is_flat,
    local_decomposition,
    prime_field,
    product,
    tensor_map,
    tensor_over,
    zero_algebra,
)
from ..finalg.predicates import fiber_algebras
from ..finalg.structure import is_reduced
from ..rspace import QcohAlgebra, Report, is_qcoh_algebra, section_algebra
from ..rspace.constructions import pushforward_space
from ..rspace.predicates import pushforward_map
from ..rspace.space import SpaceMorphism


class EtaleCover:
    """A quasi-coherent algebra whose structure maps are all étale.

    ``certified`` records which conditions were checked at construction.
    """

    __slots__ = ("base", "sheaf", "certified", "name")

    def __init__(self, base, sheaf, check=True, name=None):
        if sheaf.base is not base and sheaf.base.points != base.points:
            raise BadShape("sheaf lives on another space")
        self.base = base
        self.sheaf = sheaf
        self.name = name
        self.certified = {"finite": True, "flat": False, "etale": False, "qcoh": False}
        if check:
            rep = etale_cover_report(base, sheaf)
            if not rep.ok:
                cls = NotQcoh if rep.code == "NotQcoh" else NotEtale
                raise cls(f"{rep.code} at {rep.where}: {rep.message}", where=rep.where)
            self.certified.update(flat=True, etale=True, qcoh=True)

    @property
    def p(self):
        return self.base.p

    @property
    def points(self):
        return self.base.points

    def fiber(self, x):
        return self.sheaf.fiber[x]

    def structure(self, x):
        return self.sheaf.structure[x]

    def r(self, x, y):
        return self.sheaf.r(x, y)

    @property
    def is_zero(self):
        return all(self.fiber(x).dim == 0 for x in self.points)

    def signature(self):
        """Iso-invariant: per point, sorted (factor dim, residue dim) of the local factors."""
        out = []
        for x in self.points:
            dec = local_decomposition(self.fiber(x))
            out.append(tuple(sorted((f.dim, _residue_dim(f)) for f in dec.factors)))
        return tuple(out)

    def __repr__(self):
        label = self.name or "EtaleCover"
        return f"{label}(dims={[self.fiber(x).dim for x in self.points]})"


def _residue_dim(local):
    from ..finalg import nilradical

    return local.dim - len(nilradical(local).basis)


def etale_cover_report(space, alg):
    """Report whether ``alg`` is an étale cover of ``space``; names the first failure."""
    if not is_qcoh_algebra(alg):
        return Report(False, "NotQcoh", None, "the algebra is not quasi-coherent")
    for x in space.points:
        bad = _stalk_defect(alg.structure[x])
        if bad is not None:
            return Report(False, bad[0], x, bad[1])
    return Report(True)


@lru_cache(maxsize=8192)
def _stalk_defect(s):
    if not is_flat(s):
        return ("NotFlat", "structure map is not flat")
    for i, fib in enumerate(fiber_algebras(s)):
        if not is_reduced(fib):
            return ("NonReducedFiber", f"fiber over prime {i} is not reduced")
    return None


def is_etale_cover(space, alg):
    return etale_cover_report(space, alg).ok


def as_cover(space, alg, check=True, name=None):
    return EtaleCover(space, alg, check=check, name=name)


def local_ranks(cover):
    """{(x, k): rank of A_x over the k-th local factor of O_x}."""
    out = {}
    for x in cover.points:
        for k, r in enumerate(free_rank(cover.structure(x))):
            if r is None:
                raise NotEtale("algebra is not locally free", where=x)
            out[(x, k)] = r
    return out


def degree(cover):
    """Rank at each point; an integer when the base poset is connected."""
    X = cover.base
    if any(len(local_decomposition(X.stalk[x])) != 1 for x in X.points):
        raise NotPwConnected("degree needs a pw-connected base")
    ranks = {x: r for (x, _), r in local_ranks(cover).items()}
    comps = X.poset.components()
    for comp in comps:
        if len({ranks[x] for x in comp}) > 1:
            raise NotEtale("rank is not locally constant")
    if len(comps) == 1:
        return ranks[X.points[0]]
    return ranks


def constant_rank(cover):
    """The common rank over every local factor of every stalk, or None."""
    vals = set(local_ranks(cover).values())
    return vals.pop() if len(vals) == 1 else None


# -- constructions ---------------------------------------------------------


def structure_cover(space):
    return EtaleCover(space, QcohAlgebra.structure_sheaf(space), check=False, name="O")


def zero_cover(space):
    z = zero_algebra(space.p)
    fiber = {x: z for x in space.points}
    structure = {x: AlgebraMap(space.stalk[x], z, la.zeros(0, space.stalk[x].dim), check=False) for x in space.points}
    res = {e: identity(z) for e in space.poset.hasse}
    return EtaleCover(space, QcohAlgebra(space, fiber, structure, res, check=False), check=False, name="0")


def extend_scalars(space, field, name=None):
    """O_X (x)_{F_p} K for a finite algebra K over the prime field."""
    k = prime_field(space.p)
    to_k = AlgebraMap(k, field, field.one.reshape(-1, 1), check=False)
    tens = {}
    for x in space.points:
        o = space.stalk[x]
        tens[x] = tensor_over(AlgebraMap(k, o, o.one.reshape(-1, 1), check=False), to_k)
    fiber = {x: tens[x].algebra for x in space.points}
    structure = {x: tens[x].left for x in space.points}
    res = {(a, b): tensor_map(tens[a], tens[b], space.res[(a, b)], identity(field)) for a, b in space.poset.hasse}
    return EtaleCover(space, QcohAlgebra(space, fiber, structure, res, check=False), check=False, name=name)


class ProductCover:
    """A_1 x ... x A_k with the projection morphisms."""

    __slots__ = ("cover", "projections")

    def __init__(self, cover, projections):
        self.cover = cover
        self.projections = projections


def product_cover(*covers, name=None):
    from .morphisms import CoverMorphism

    space = covers[0].base
    fiber, structure, projs = {}, {}, {}
    for x in space.points:
        prod, pr = product(*[c.fiber(x) for c in covers])
        fiber[x], projs[x] = prod, pr
        structure[x] = AlgebraMap(space.stalk[x], prod, np.vstack([c.structure(x).mat for c in covers]), check=False)
    res = {}
    for a, b in space.poset.hasse:
        blocks = [c.sheaf.res[(a, b)].mat for c in covers]
        res[(a, b)] = AlgebraMap(fiber[a], fiber[b], _block_diag(blocks), check=False)
    cover = EtaleCover(space, QcohAlgebra(space, fiber, structure, res, check=False), check=False, name=name)
    maps = [CoverMorphism(cover, c, {x: projs[x][i] for x in space.points}, check=False) for i, c in enumerate(covers)]
    return ProductCover(cover, maps)


def trivial_cover(space, n):
    """O_X^{x n}; n = 0 gives the zero cover."""
    if n == 0:
        return zero_cover(space)
    return product_cover(*[structure_cover(space)] * n, name=f"O^{n}").cover


def _block_diag(blocks):
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = la.zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


class TensorCover:
    """A (x)_C B with the two coprojections."""

    __slots__ = ("cover", "left", "right", "tensors")

    def __init__(self, cover, left, right, tensors):
        self.cover = cover
        self.left = left
        self.right = right
        self.tensors = tensors


def tensor_cover(u, v, name=None):
    """Pushout of u: C -> A and v: C -> B, computed pointwise."""
    from .morphisms import CoverMorphism

    if u.src is not v.src and u.src.signature() != v.src.signature():
        raise BadShape("tensor needs maps with a common source")
    space = u.src.base
    tens = {x: tensor_over(u.maps[x], v.maps[x]) for x in space.points}
    fiber = {x: tens[x].algebra for x in space.points}
    structure = {x: tens[x].left.compose(u.dst.structure(x)) for x in space.points}
    res = {
        (a, b): tensor_map(tens[a], tens[b], u.dst.sheaf.res[(a, b)], v.dst.sheaf.res[(a, b)])
        for a, b in space.poset.hasse
    }
    cover = EtaleCover(space, QcohAlgebra(space, fiber, structure, res, check=False), check=False, name=name)
    left = CoverMorphism(u.dst, cover, {x: tens[x].left for x in space.points}, check=False)
    right = CoverMorphism(v.dst, cover, {x: tens[x].right for x in space.points}, check=False)
    return TensorCover(cover, left, right, tens)


def tensor_over_base(a, b, name=None):
    from .morphisms import structure_morphism

    return tensor_cover(structure_morphism(a), structure_morphism(b), name=name)


# -- transport along morphisms of spaces --------------------------------------


def pullback_cover(f, cover):
    """f^* A: the stalk at x is A_{f(x)} (x) O_x."""
    X = f.src
    tens = {x: tensor_over(cover.structure(f(x)), f.comorphism[x]) for x in X.points}
    fiber = {x: tens[x].algebra for x in X.points}
    structure = {x: tens[x].right for x in X.points}
    res = {}
    for a, b in X.poset.hasse:
        res[(a, b)] = tensor_map(tens[a], tens[b], cover.r(f(a), f(b)), X.res[(a, b)])
    return EtaleCover(X, QcohAlgebra(X, fiber, structure, res, check=False), check=False)


def pushforward_cover(f, cover):
    """f_* A: the stalk at y is A(f^{-1}(U_y))."""
    top = cover.sheaf.as_space()
    g = SpaceMorphism(top, f.dst, dict(f.map.assignment), {x: cover.structure(x).compose(f.comorphism[x]) for x in top.points}, check=False)
    pushed, _ = pushforward_space(g)
    Y = f.dst
    structure = {y: pushforward_map(g, y) for y in Y.points}
    sheaf = QcohAlgebra(Y, pushed.stalk, structure, pushed.res, check=False)
    return EtaleCover(Y, sheaf, check=False)


def global_algebra(cover):
    """A(X) with its maps to the stalks."""
    alg, maps, _ = section_algebra(cover.sheaf.as_space(), cover.points)
    return alg, maps
