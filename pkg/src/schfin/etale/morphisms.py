"""Morphisms of étale covers: enumeration, automorphisms, invariants and factorization."""

from functools import lru_cache
from itertools import product as iproduct

import numpy as np

from .. import linalg as la
from ..errors import NotEtale, NotMultiplicative, NotSubgroup, NotUnital, SizeBound
from ..finalg import AlgebraMap, corner, identity, local_decomposition, minimal_polynomial, product, subalgebra
from ..finalg.structure import ENUMERATION_BOUND, primitive_idempotents
from ..rspace import QcohAlgebra
from .cover import EtaleCover

HOM_BOUND = 200000


class CoverMorphism:
    """O_X-algebra map A -> B given pointwise."""

    __slots__ = ("src", "dst", "maps")

    def __init__(self, src, dst, maps, check=True):
        self.src = src
        self.dst = dst
        self.maps = {x: maps[x] for x in src.points}
        if check:
            bad = self.defect()
            if bad is not None:
                raise NotMultiplicative(f"not a morphism of covers at {bad}", where=bad)

    def defect(self):
        """First point or edge where compatibility fails, or None."""
        for x in self.src.points:
            m = self.maps[x]
            if m.compose(self.src.structure(x)) != self.dst.structure(x):
                return x
        for e in self.src.base.poset.hasse:
            if self.maps[e[1]].compose(self.src.sheaf.res[e]) != self.dst.sheaf.res[e].compose(self.maps[e[0]]):
                return e
        return None

    def __call__(self, x):
        return self.maps[x]

    def compose(self, other):
        """self after other."""
        return CoverMorphism(other.src, self.dst, {x: self.maps[x].compose(other.maps[x]) for x in self.src.points}, check=False)

    def is_injective(self):
        return all(m.is_injective() for m in self.maps.values())

    def is_surjective(self):
        return all(m.is_surjective() for m in self.maps.values())

    def is_iso(self):
        return all(m.is_iso() for m in self.maps.values())

    def inverse(self):
        return CoverMorphism(self.dst, self.src, {x: m.inverse() for x, m in self.maps.items()}, check=False)

    def key(self):
        return tuple(self.maps[x].mat.tobytes() for x in self.src.points)

    def __eq__(self, other):
        return isinstance(other, CoverMorphism) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"CoverMorphism({self.src!r} -> {self.dst!r})"


def structure_morphism(cover):
    """O_X -> A."""
    from .cover import structure_cover

    o = structure_cover(cover.base)
    return CoverMorphism(o, cover, {x: cover.structure(x) for x in cover.points}, check=False)


def identity_morphism(cover):
    return CoverMorphism(cover, cover, {x: identity(cover.fiber(x)) for x in cover.points}, check=False)


def is_mono(f):
    return f.is_injective()


def is_epi(f):
    return f.is_surjective()


# -- enumeration -------------------------------------------------------------


def _closure_basis(alg, gens):
    """Pairs spanning the subalgebra generated by the first coordinates.

    ``gens`` are pairs (a, b); products are formed coordinatewise, so the
    second coordinates follow any multiplicative map sending a to b.
    """
    a_alg, b_alg = alg
    p = a_alg.p
    span = []
    red = la.Reducer(la.zeros(0, a_alg.dim), a_alg.dim, p)
    queue = [(a_alg.one, b_alg.one)] + list(gens)
    while queue:
        va, vb = queue.pop(0)
        if red.contains(va):
            continue
        span.append((va, vb))
        red = la.Reducer(np.array([s[0] for s in span]), a_alg.dim, p)
        for ga, gb in gens:
            queue.append((a_alg.mult(va, ga), b_alg.mult(vb, gb)))
    return span


def _generators(a, base_images):
    """Greedy algebra generators of ``a`` over the span of ``base_images``."""
    p = a.p
    gens = []
    while True:
        pairs = [(v, v) for v in list(base_images) + gens]
        span = _closure_basis((a, a), pairs)
        if len(span) == a.dim:
            return gens
        red = la.Reducer(np.array([s[0] for s in span]), a.dim, p)
        gens.append(next(a.basis(i) for i in range(a.dim) if not red.contains(a.basis(i))))


def _roots(b, poly):
    """Elements of b annihilated by a polynomial (coefficients low degree first)."""
    if b.p ** b.dim > ENUMERATION_BOUND:
        raise SizeBound(f"target of dimension {b.dim} is too large to enumerate")
    elems = b.elements()
    val = np.zeros_like(elems)
    power = np.tile(b.one, (len(elems), 1))
    for c in poly:
        val = (val + c * power) % b.p
        power = np.einsum("ri,rj,ijk->rk", power, elems, b.mul) % b.p
    return [elems[i] for i in range(len(elems)) if not val[i].any()]


@lru_cache(maxsize=4096)
def local_homs(sa, sb):
    """All algebra maps A -> B with phi . sa = sb, for local A and B."""
    a, b = sa.dst, sb.dst
    if b.dim == 0:
        return (AlgebraMap(a, b, la.zeros(0, a.dim), check=False),)
    if a.dim == 0:
        return ()
    base = [(sa(o), sb(o)) for o in np.eye(sa.src.dim, dtype=np.int64)]
    gens = _generators(a, [pa for pa, _ in base])
    cands = [_roots(b, minimal_polynomial(a, g)) for g in gens]
    out = []
    for images in iproduct(*cands):
        span = _closure_basis((a, b), base + list(zip(gens, images)))
        ma = np.array([s[0] for s in span], dtype=np.int64).T
        mb = np.array([s[1] for s in span], dtype=np.int64).T
        mat = (mb @ la.inverse(ma, a.p)) % a.p
        try:
            phi = AlgebraMap(a, b, mat)
        except (NotMultiplicative, NotUnital):
            continue
        if phi.compose(sa) == sb:
            out.append(phi)
    return tuple(out)


def point_homs(sa, sb, bound=HOM_BOUND):
    """All O-algebra maps A -> B for O -> A, O -> B (any A, B)."""
    a, b = sa.dst, sb.dst
    if b.dim == 0:
        return [AlgebraMap(a, b, la.zeros(0, a.dim), check=False)]
    if a.dim == 0:
        return []
    da, db = local_decomposition(a), local_decomposition(b)
    options = []
    total = 1
    for j in range(len(db)):
        sbj = db.projections[j].compose(sb)
        opts = []
        for i in range(len(da)):
            for psi in local_homs(da.projections[i].compose(sa), sbj):
                opts.append((psi.mat @ da.projections[i].mat) % a.p)
        total *= len(opts)
        if total > bound:
            raise SizeBound(f"more than {bound} candidate maps")
        options.append([(db.inclusions[j] @ m) % a.p for m in opts])
    out = []
    for choice in iproduct(*options):
        mat = sum(choice) % a.p if choice else la.zeros(b.dim, a.dim)
        out.append(AlgebraMap(a, b, mat, check=False))
    return out


def hom_set(src, dst, bound=HOM_BOUND):
    """Every morphism of covers src -> dst, by backtracking over the points."""
    space = src.base
    order = space.poset.topological_order()
    opts = {x: point_homs(src.structure(x), dst.structure(x), bound) for x in order}
    below = {x: [lo for lo, hi in space.poset.hasse if hi == x] for x in order}
    out, cur = [], {}

    def go(k):
        if len(out) > bound:
            raise SizeBound(f"more than {bound} morphisms")
        if k == len(order):
            out.append(CoverMorphism(src, dst, dict(cur), check=False))
            return
        x = order[k]
        for phi in opts[x]:
            if all(phi.compose(src.sheaf.res[(lo, x)]) == dst.sheaf.res[(lo, x)].compose(cur[lo]) for lo in below[x]):
                cur[x] = phi
                go(k + 1)
        cur.pop(x, None)

    go(0)
    return out


class AutGroup:
    """Automorphisms with the composition table ``table[i][j] = index of g_i . g_j``."""

    __slots__ = ("elements", "table", "identity")

    def __init__(self, elements, table, identity):
        self.elements = elements
        self.table = table
        self.identity = identity

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def element_order(self, i):
        n, cur = 1, i
        while cur != self.identity:
            cur = self.table[i][cur]
            n += 1
        return n

    def is_abelian(self):
        n = len(self.elements)
        return all(self.table[i][j] == self.table[j][i] for i in range(n) for j in range(n))

    def generated(self, idx):
        """Indices of the subgroup generated by some elements."""
        sub = {self.identity}
        frontier = [self.identity]
        while frontier:
            g = frontier.pop()
            for h in idx:
                k = self.table[h][g]
                if k not in sub:
                    sub.add(k)
                    frontier.append(k)
        return sorted(sub)


def aut_group(cover, bound=HOM_BOUND):
    auts = [g for g in hom_set(cover, cover, bound) if g.is_iso()]
    index = {g: i for i, g in enumerate(auts)}
    table = [[index[g.compose(h)] for h in auts] for g in auts]
    ident = index[identity_morphism(cover)]
    return AutGroup(auts, table, ident)


def check_subgroup(group):
    """A nonempty finite set of automorphisms closed under composition."""
    if not group:
        raise NotSubgroup("a subgroup is nonempty")
    keys = set(group)
    for g in group:
        if not g.is_iso():
            raise NotSubgroup("elements must be automorphisms")
        for h in group:
            if g.compose(h) not in keys:
                raise NotSubgroup("not closed under composition")


class Quotient:
    """A^G with its inclusion into A."""

    __slots__ = ("cover", "inclusion")

    def __init__(self, cover, inclusion):
        self.cover = cover
        self.inclusion = inclusion


def quotient_by_group(cover, group, check=True):
    """Stalkwise invariants of a finite group of automorphisms."""
    group = list(group)
    check_subgroup(group)
    space, p = cover.base, cover.p
    fiber, incl = {}, {}
    for x in space.points:
        a = cover.fiber(x)
        eq = [(g.maps[x].mat - la.eye(a.dim)) % p for g in group]
        inv = la.nullspace(np.vstack(eq), p) if a.dim else la.zeros(0, 0)
        fiber[x], incl[x] = subalgebra(a, inv)
    structure, res = {}, {}
    for x in space.points:
        structure[x] = _factor_through(cover.structure(x), incl[x])
    for lo, hi in space.poset.hasse:
        res[(lo, hi)] = _factor_through(cover.sheaf.res[(lo, hi)].compose(incl[lo]), incl[hi])
    sheaf = QcohAlgebra(space, fiber, structure, res, check=False)
    q = EtaleCover(space, sheaf, check=check)
    return Quotient(q, CoverMorphism(q, cover, incl, check=False))


def _factor_through(f, inc):
    """The map g with inc . g = f, for f landing in the image of an injective inc."""
    p = f.p
    red_mat = inc.mat
    cols = []
    for k in range(f.src.dim):
        sol = la.solve(red_mat, f.mat[:, k], p)
        if sol is None:
            raise NotEtale("map does not land in the subalgebra")
        cols.append(sol)
    mat = np.array(cols, dtype=np.int64).T.reshape(inc.src.dim, f.src.dim)
    return AlgebraMap(f.src, inc.src, mat, check=False)


def _idempotent_generator(alg, ideal_rows):
    """The idempotent e with I = eA, as a sum of primitive idempotents in I."""
    p = alg.p
    red = la.Reducer(np.asarray(ideal_rows, dtype=np.int64).reshape(-1, alg.dim), alg.dim, p)
    e = alg.zero()
    for f in primitive_idempotents(alg):
        if red.contains(f):
            e = (e + f) % p
    span = la.rank(alg.lmat(e), p) if alg.dim else 0
    if span != red.dim:
        raise NotEtale("ideal is not generated by an idempotent")
    return e


def _corner_cover(cover, idem):
    """The cover x -> e_x A_x with the projection A -> eA."""
    space = cover.base
    fiber, proj, inc = {}, {}, {}
    for x in space.points:
        fiber[x], proj[x], inc[x] = corner(cover.fiber(x), idem[x])
    structure = {x: proj[x].compose(cover.structure(x)) for x in space.points}
    res = {}
    for lo, hi in space.poset.hasse:
        mat = (proj[hi].mat @ cover.sheaf.res[(lo, hi)].mat @ inc[lo]) % cover.p
        res[(lo, hi)] = AlgebraMap(fiber[lo], fiber[hi], mat, check=False)
    c = EtaleCover(space, QcohAlgebra(space, fiber, structure, res, check=False), check=False)
    return c, CoverMorphism(cover, c, proj, check=False), inc


class Factorization:
    """f = mono . epi with A = image x complement."""

    __slots__ = ("epi", "mono", "image", "complement", "kernel_idempotent", "splitting")

    def __init__(self, epi, mono, image, complement, kernel_idempotent, splitting):
        self.epi = epi
        self.mono = mono
        self.image = image
        self.complement = complement
        self.kernel_idempotent = kernel_idempotent
        self.splitting = splitting


def image_factorization(f):
    """A -> A/ker f -> B with ker f = eA and A = (1-e)A x eA."""
    A = f.src
    p = A.p
    e, one_minus = {}, {}
    for x in A.points:
        a = A.fiber(x)
        e[x] = _idempotent_generator(a, f.maps[x].kernel().basis) if a.dim else a.zero()
        one_minus[x] = (a.one - e[x]) % p
    image, epi, inc = _corner_cover(A, one_minus)
    comp, comp_proj, _ = _corner_cover(A, e)
    mono = CoverMorphism(image, f.dst, {x: AlgebraMap(image.fiber(x), f.dst.fiber(x), (f.maps[x].mat @ inc[x]) % p, check=False) for x in A.points}, check=False)
    split = {}
    for x in A.points:
        prod, _ = product(image.fiber(x), comp.fiber(x))
        split[x] = AlgebraMap(A.fiber(x), prod, np.vstack([epi.maps[x].mat, comp_proj.maps[x].mat]), check=False)
    return Factorization(epi, mono, image, comp, e, split)
