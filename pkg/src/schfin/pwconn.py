"""pw-connectification, connectivity predicates and well-connected components.

pw(X) has one point per local factor of each stalk; the point for the
k-th factor of O_x is named ``"x/k"`` with factors in canonical idempotent
order.
"""

import numpy as np

from .errors import NotWellConnected
from .finalg import AlgebraMap, corner, local_decomposition, product
from .poset import Poset, is_top_connected
from .rspace import QcohAlgebra, RingedPoset, SpaceMorphism, section_algebra
from .finalg.structure import primitive_idempotents


def pw_id(x, k):
    return f"{x}/{k}"


class PwSpace:
    """pw(X) with its projection to X and the index of points."""

    __slots__ = ("space", "projection", "index", "base")

    def __init__(self, space, projection, index, base):
        self.space = space
        self.projection = projection
        self.index = index
        self.base = base

    def points_over(self, x):
        return [q for q in self.space.points if self.index[q][0] == x]


def _factor_map(f, dec_src, j, dec_dst, k):
    """e_j A -> e'_k B induced by f: A -> B."""
    mat = (dec_dst.projections[k].mat @ f.mat @ dec_src.inclusions[j]) % f.p
    return AlgebraMap(dec_src.factors[j], dec_dst.factors[k], mat, check=False)


def _lies_over(f, dec_src, dec_dst, k):
    """Index j of the source factor below the k-th target factor."""
    ek = dec_dst.idempotents[k]
    for j, e in enumerate(dec_src.idempotents):
        if f.dst.mult(f(e), ek).any():
            return j
    return None


def pw_space(space):
    """pw(X) together with the projection pi: pw(X) -> X."""
    dec = {x: local_decomposition(space.stalk[x]) for x in space.points}
    ids, index = [], {}
    for x in space.points:
        for k in range(len(dec[x])):
            q = pw_id(x, k)
            ids.append(q)
            index[q] = (x, k)
    rel = []
    for x in space.points:
        for x2 in space.poset.up(x):
            if x2 == x:
                continue
            r = space.r(x, x2)
            for k2 in range(len(dec[x2])):
                k = _lies_over(r, dec[x], dec[x2], k2)
                if k is not None:
                    rel.append((pw_id(x, k), pw_id(x2, k2)))
    poset = Poset.from_relations(ids, rel)
    stalk = {q: dec[index[q][0]].factors[index[q][1]] for q in ids}
    res = {}
    for a, b in poset.hasse:
        (x, k), (x2, k2) = index[a], index[b]
        res[(a, b)] = _factor_map(space.r(x, x2), dec[x], k, dec[x2], k2)
    pw = RingedPoset(poset, stalk, res, check=False)
    co = {q: dec[index[q][0]].projections[index[q][1]] for q in ids}
    proj = SpaceMorphism(pw, space, {q: index[q][0] for q in ids}, co, check=False)
    return PwSpace(pw, proj, index, space)


def pw_morphism(f, pw_src=None, pw_dst=None):
    """pw(f): pw(X) -> pw(Y), commuting with the projections."""
    ps = pw_src or pw_space(f.src)
    pd = pw_dst or pw_space(f.dst)
    assign, co = {}, {}
    for q in ps.space.points:
        x, k = ps.index[q]
        y = f(x)
        ds, dd = local_decomposition(f.dst.stalk[y]), local_decomposition(f.src.stalk[x])
        j = _lies_over(f.comorphism[x], ds, dd, k)
        assign[q] = pw_id(y, j)
        co[q] = _factor_map(f.comorphism[x], ds, j, dd, k)
    return SpaceMorphism(ps.space, pd.space, assign, co, check=False)


def connectivity_profile(space):
    """Top-connected, connected, pw-connected and well-connected flags."""
    if not space.points:
        return {"top_connected": False, "connected": False, "pw_connected": False, "well_connected": False}
    alg, _, _ = section_algebra(space, space.points)
    top = is_top_connected(space.poset)
    connected = alg.dim > 0 and len(primitive_idempotents(alg)) == 1
    pw = all(len(local_decomposition(space.stalk[x])) == 1 for x in space.points)
    return {"top_connected": top, "connected": connected, "pw_connected": pw, "well_connected": connected and pw}


def is_well_connected(space):
    return connectivity_profile(space)["well_connected"]


class Component:
    __slots__ = ("space", "inclusion", "points")

    def __init__(self, space, inclusion, points):
        self.space = space
        self.inclusion = inclusion
        self.points = points

    def __iter__(self):
        return iter((self.space, self.inclusion))


def wc_components(space, pw=None):
    """Topological components of pw(X), each mapped to X through the projection."""
    pw = pw or pw_space(space)
    out = []
    for comp in pw.space.poset.components():
        sub = pw.space.subspace(comp)
        inc = SpaceMorphism(
            sub,
            space,
            {q: pw.index[q][0] for q in comp},
            {q: pw.projection.comorphism[q] for q in comp},
            check=False,
        )
        out.append(Component(sub, inc, comp))
    return out


class AlgebraComponents:
    """A = A_1 x ... x A_k with the explicit isomorphism at each point."""

    __slots__ = ("parts", "isomorphism")

    def __init__(self, parts, isomorphism):
        self.parts = parts
        self.isomorphism = isomorphism

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)


def wc_components_algebra(space, alg, check=True):
    """Well-connected components of a quasi-coherent algebra over a well-connected space.

    The j-th part at x is the corner e A_x, with e the sum of the primitive
    idempotents of A_x whose pw-points lie in the j-th component of pw(X, A).
    """
    if check and not is_well_connected(space):
        raise NotWellConnected("the base must be well-connected")
    pw = pw_space(alg.as_space())
    p = space.p
    parts, pieces = [], {x: [] for x in space.points}
    for comp in pw.space.poset.components():
        fiber, structure, proj, incl = {}, {}, {}, {}
        for x in space.points:
            a = alg.fiber[x]
            dec = local_decomposition(a)
            e = a.zero()
            for q in comp:
                if pw.index[q][0] == x:
                    e = (e + dec.idempotents[pw.index[q][1]]) % p
            fiber[x], proj[x], incl[x] = corner(a, e)
            structure[x] = proj[x].compose(alg.structure[x])
            pieces[x].append(proj[x])
        res = {}
        for lo, hi in space.poset.hasse:
            mat = (proj[hi].mat @ alg.res[(lo, hi)].mat @ incl[lo]) % p
            res[(lo, hi)] = AlgebraMap(fiber[lo], fiber[hi], mat, check=False)
        parts.append(QcohAlgebra(space, fiber, structure, res, check=False))
    iso = {}
    for x in space.points:
        prod, _ = product(*[pr.dst for pr in pieces[x]])
        iso[x] = AlgebraMap(alg.fiber[x], prod, np.vstack([pr.mat for pr in pieces[x]]), check=False)
    return AlgebraComponents(parts, iso)
