"""Fibered products, Stein factorization, relative spectrum, open pushforward, cylinders."""

import numpy as np

from .. import linalg as la
from ..errors import NotOpen, NotQcoh, NotSchematicMorphism
from ..finalg import AlgebraMap, identity, tensor_map, tensor_over
from ..poset import cyl_ids, cylinder_poset, poset_fiber_product
from .predicates import is_affine_morphism, is_finite_space, is_qc_isomorphism, is_qcoh_algebra, is_schematic_morphism, is_schematic_space, pushforward_map
from .sections import section_algebra, sections
from .space import Module, ModuleSheaf, RingedPoset, SpaceMorphism, module_tensor


class FiberProduct:
    __slots__ = ("space", "p1", "p2", "pairs", "tensors")

    def __init__(self, space, p1, p2, pairs, tensors):
        self.space = space
        self.p1 = p1
        self.p2 = p2
        self.pairs = pairs
        self.tensors = tensors

    def __iter__(self):
        return iter((self.space, self.p1, self.p2))


def fiber_product(f, g, check=True):
    """X x_Z Y with stalks O_x (x)_{O_z} O_y and the two projections."""
    if f.dst is not g.dst and f.dst.poset != g.dst.poset:
        raise NotSchematicMorphism("fibered product needs a common target")
    if check and not (is_schematic_morphism(f) and is_schematic_morphism(g)):
        raise NotSchematicMorphism("fibered products are taken along schematic morphisms")
    poset, _, _, pairs = poset_fiber_product(f.map, g.map)
    tens = {q: tensor_over(f.comorphism[x], g.comorphism[y]) for q, (x, y) in pairs.items()}
    stalk = {q: t.algebra for q, t in tens.items()}
    res = {}
    for a, b in poset.hasse:
        (x, y), (x2, y2) = pairs[a], pairs[b]
        res[(a, b)] = tensor_map(tens[a], tens[b], f.src.r(x, x2), g.src.r(y, y2))
    space = RingedPoset(poset, stalk, res, check=False)
    p1 = SpaceMorphism(space, f.src, {q: xy[0] for q, xy in pairs.items()}, {q: tens[q].left for q in pairs}, check=False)
    p2 = SpaceMorphism(space, g.src, {q: xy[1] for q, xy in pairs.items()}, {q: tens[q].right for q in pairs}, check=False)
    return FiberProduct(space, p1, p2, pairs, tens)


def _restrict_sections(s_big, s_small, alg_big, alg_small):
    """Restriction O(V) -> O(V') for V' inside V, in section coordinates."""
    cols = []
    for row in s_big.basis:
        sub = np.concatenate([row[s_big.blocks[t]] for t in s_small.points]) if s_small.points else la.zeros(1, 0)[0]
        cols.append(s_small.coords(sub))
    mat = np.array(cols, dtype=np.int64).T.reshape(alg_small.dim, alg_big.dim) if cols else la.zeros(alg_small.dim, 0)
    return AlgebraMap(alg_big, alg_small, mat, check=False)


class SteinFactorization:
    __slots__ = ("f_prime", "rho", "space", "f_prime_qc_iso")

    def __init__(self, f_prime, rho, space, f_prime_qc_iso):
        self.f_prime = f_prime
        self.rho = rho
        self.space = space
        self.f_prime_qc_iso = f_prime_qc_iso

    def __iter__(self):
        return iter((self.f_prime, self.rho))


def pushforward_space(f):
    """(Y, f_* O_X) with the data needed to factor f through it."""
    X, Y = f.src, f.dst
    py = Y.poset
    data = {y: section_algebra(X, f.preimage(py.up(y))) for y in py.elements}
    stalk = {y: data[y][0] for y in py.elements}
    res = {(a, b): _restrict_sections(data[a][2], data[b][2], stalk[a], stalk[b]) for a, b in py.hasse}
    return RingedPoset(py, stalk, res, check=False), data


def stein_factorization(f, check=True):
    """f = rho . f' with rho: (Y, f_* O_X) -> Y the topological identity."""
    if check and not is_schematic_morphism(f):
        raise NotSchematicMorphism("Stein factorization needs a schematic morphism")
    X, Y = f.src, f.dst
    y2, data = pushforward_space(f)
    rho = SpaceMorphism(y2, Y, {y: y for y in Y.points}, {y: pushforward_map(f, y) for y in Y.points}, check=False)
    co = {x: data[f(x)][1][x] for x in X.points}
    f1 = SpaceMorphism(X, y2, dict(f.map.assignment), co, check=False)
    qc = None
    if check and is_affine_morphism(f):
        qc = is_qc_isomorphism(f1)
    return SteinFactorization(f1, rho, y2, qc)


def relspec(space, alg, check=True):
    """(X, A) with its structure morphism to X."""
    if check and not is_qcoh_algebra(alg):
        raise NotQcoh("relative spectrum needs a quasi-coherent algebra")
    top = alg.as_space()
    return top, SpaceMorphism(top, space, {x: x for x in space.points}, dict(alg.structure), check=False)


def open_inclusion(space, u, sub=None):
    """Inclusion of an open subspace as a morphism."""
    if not space.poset.is_open(u):
        raise NotOpen("not an open set", where=tuple(u))
    sub = sub if sub is not None else space.subspace(u)
    return SpaceMorphism(sub, space, {x: x for x in sub.points}, {x: identity(space.stalk[x]) for x in sub.points}, check=False)


def open_pushforward(space, u, sheaf):
    """j_* M for M a ModuleSheaf on the open subspace u: (j_* M)_x = M(U cap U_x)."""
    if set(sheaf.base.points) != set(u):
        raise NotOpen("sheaf must live on the open subspace", where=tuple(u))
    return pushforward_sheaf(open_inclusion(space, u, sheaf.base), sheaf)


def cylinder(f):
    """Cyl(f): X and Y glued along y <= x whenever y <= f(x)."""
    X, Y = f.src, f.dst
    poset = cylinder_poset(f.map)
    xs, ys = cyl_ids(f.map)
    back = {v: ("X", k) for k, v in xs.items()}
    back.update({v: ("Y", k) for k, v in ys.items()})
    stalk = {v: (X.stalk[k] if side == "X" else Y.stalk[k]) for v, (side, k) in back.items()}
    res = {}
    for a, b in poset.hasse:
        (sa, ka), (sb, kb) = back[a], back[b]
        if sa == sb == "X":
            res[(a, b)] = X.r(ka, kb)
        elif sa == sb == "Y":
            res[(a, b)] = Y.r(ka, kb)
        else:
            res[(a, b)] = f.pullback_ring(ka, kb)
    return RingedPoset(poset, stalk, res, check=False)


def is_flat_immersion(f):
    """Experimental: Cyl(f) schematic."""
    cyl = cylinder(f)
    return is_finite_space(cyl) and is_schematic_space(cyl)


def collapse(space, target, comorphism):
    """Morphism from a space to a one-point space."""
    (pt,) = target.points
    return SpaceMorphism(space, target, {x: pt for x in space.points}, comorphism)


def sheaf_from_module(space, module):
    """Sheaf generated by a module M over O(X): M_x = M (x)_{O(X)} O_x."""
    alg, maps, _ = section_algebra(space, space.points)
    if module.ring != alg:
        raise NotQcoh("module must be given over the global sections")
    fibers, data = {}, {}
    for x in space.points:
        mod, _, red = module_tensor(module, maps[x])
        fibers[x] = mod
        data[x] = red
    p = space.p
    res = {}
    for a, b in space.poset.hasse:
        full = np.kron(la.eye(module.dim), space.res[(a, b)].mat) % p
        res[(a, b)] = (data[b].projection() @ full @ data[a].section()) % p
    return ModuleSheaf(space, fibers, res, check=False)


def pushforward_sheaf(f, sheaf):
    """f_* M: the fiber at y is M(f^{-1}(U_y)) over O_{Y,y}."""
    X, Y = f.src, f.dst
    p = X.p
    secs = {y: sections(sheaf, f.preimage(Y.poset.up(y))) for y in Y.points}
    fiber = {}
    for y in Y.points:
        s = secs[y]
        a = Y.stalk[y]
        act = np.zeros((a.dim, s.dim, s.dim), dtype=np.int64)
        for k in range(a.dim):
            cols = []
            for row in s.basis:
                w = np.zeros_like(row)
                for t in s.points:
                    w[s.blocks[t]] = sheaf.fiber[t].act(f.pullback_ring(y, t)(a.basis(k))) @ row[s.blocks[t]]
                cols.append(s.coords(w % p))
            if cols:
                act[k] = np.array(cols, dtype=np.int64).T
        fiber[y] = Module(a, act, dim=s.dim, check=False)
    res = {}
    for a, b in Y.poset.hasse:
        sa, sb = secs[a], secs[b]
        cols = []
        for row in sa.basis:
            sub = np.concatenate([row[sa.blocks[t]] for t in sb.points]) if sb.points else la.zeros(1, 0)[0]
            cols.append(sb.coords(sub))
        res[(a, b)] = np.array(cols, dtype=np.int64).T.reshape(sb.dim, sa.dim) if cols else la.zeros(sb.dim, sa.dim)
    return ModuleSheaf(Y, fiber, res, check=False)
