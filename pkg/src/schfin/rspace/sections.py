"""Sections over open sets and canonical maps between fibers."""

import numpy as np

from .. import linalg as la
from ..errors import NotOpen
from ..finalg import Algebra, AlgebraMap, product, zero_algebra
from .space import Module, module_tensor


class Sections:
    """Compatible tuples over an open set.

    ``basis`` has one row per section, written in the coordinates of the
    product of fibers; ``blocks[t]`` is the slice of point t.
    """

    def __init__(self, points, blocks, basis, p):
        self.points = points
        self.blocks = blocks
        self.basis = basis
        self.p = p
        self._red = la.Reducer(basis, basis.shape[1], p)

    @property
    def dim(self):
        return len(self.basis)

    def component(self, row, t):
        return row[..., self.blocks[t]]

    def coords(self, vec):
        """Coordinates of a compatible tuple in ``basis``."""
        # basis is kept in echelon form, so coordinates are read at pivots
        return la.span_coords(self._red.basis, self._red.pivots, vec, self.p)

    def contains(self, vec):
        return self._red.contains(vec)


def _check_open(poset, u):
    if not poset.is_open(u):
        raise NotOpen("sections are taken over open sets", where=tuple(u))


def _sections(poset, u, dim_of, restrict, p):
    u = poset.sort(u)
    blocks, off = {}, 0
    for t in u:
        blocks[t] = slice(off, off + dim_of(t))
        off += dim_of(t)
    rows = []
    inside = set(u)
    for lo, hi in poset.hasse:
        if lo in inside and hi in inside:
            d = la.zeros(dim_of(hi), off)
            d[:, blocks[lo]] = restrict(lo, hi)
            d[:, blocks[hi]] -= la.eye(dim_of(hi))
            rows.append(d % p)
    diff = np.vstack(rows) if rows else la.zeros(0, off)
    basis = la.row_basis(la.nullspace(diff, p), p, off) if off else la.zeros(0, 0)
    return Sections(u, blocks, basis, p)


def sections(sheaf, u):
    """Sections of a ModuleSheaf (or a space's structure sheaf) over an open set."""
    if hasattr(sheaf, "stalk"):
        sp = sheaf
        _check_open(sp.poset, u)
        return _sections(sp.poset, u, lambda t: sp.stalk[t].dim, lambda a, b: sp.r(a, b).mat, sp.p)
    sp = sheaf.base
    _check_open(sp.poset, u)
    return _sections(sp.poset, u, lambda t: sheaf.fiber[t].dim, sheaf.r, sp.p)


def section_algebra(space, u):
    """O(U) as an algebra with its restriction maps to the stalks in U.

    Returns (algebra, {t: AlgebraMap O(U) -> O_t}, Sections).
    """
    s = sections(space, u)
    p = space.p
    if s.dim == 0:
        z = zero_algebra(p)
        return z, {t: AlgebraMap(z, space.stalk[t], la.zeros(space.stalk[t].dim, 0), check=False) for t in s.points}, s

    def mult(v, w):
        out = np.zeros_like(v)
        for t in s.points:
            out[s.blocks[t]] = space.stalk[t].mult(v[s.blocks[t]], w[s.blocks[t]])
        return out

    n = s.dim
    mul = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i, n):
            c = s.coords(mult(s.basis[i], s.basis[j]))
            mul[i, j] = mul[j, i] = c
    one = np.concatenate([space.stalk[t].one for t in s.points])
    alg = Algebra(p, mul, s.coords(one), check=False)
    maps = {t: AlgebraMap(alg, space.stalk[t], s.basis[:, s.blocks[t]].T % p, check=False) for t in s.points}
    return alg, maps, s


def global_to_stalks(space, u):
    """O(U) -> prod_{t in U} O_t."""
    alg, maps, s = section_algebra(space, u)
    prod, _ = product(*[space.stalk[t] for t in s.points]) if s.points else (zero_algebra(space.p), [])
    mat = s.basis.T % space.p if s.dim else la.zeros(prod.dim, alg.dim)
    return AlgebraMap(alg, prod, mat, check=False)


def sections_module(sheaf, u):
    """M(U) as a module over O(U); returns (O(U), Module, Sections)."""
    sp = sheaf.base
    alg, maps, s = section_algebra(sp, u)
    m = sections(sheaf, u)
    return alg, Module(alg, _module_action(sheaf, m, alg, maps), dim=m.dim, check=False), m


def canonical_map(sheaf, x, y):
    """M_x (x)_{O_x} O_y -> M_y, m (x) s -> s res(m).

    Returns (dim of the tensor product, matrix).
    """
    sp = sheaf.base
    r = sp.r(x, y)
    mod, _, red = module_tensor(sheaf.fiber[x], r)
    res = sheaf.r(x, y)
    s_dim = r.dst.dim
    fy = sheaf.fiber[y]
    cols = []
    for k in red.free:
        i, j = divmod(k, s_dim)
        cols.append((fy.act(r.dst.basis(j)) @ res[:, i]) % sp.p)
    mat = np.array(cols, dtype=np.int64).T.reshape(fy.dim, len(cols)) if cols else la.zeros(fy.dim, 0)
    return mod.dim, mat


def fiber_map(sections_obj, alg, maps, t, sheaf):
    """M(U) (x)_{O(U)} O_t -> M_t for the generated-sheaf comparison."""
    sp = sheaf.base
    m = sections_obj
    mod_u = Module(alg, _module_action(sheaf, m, alg, maps), dim=m.dim, check=False)
    tens, _, red = module_tensor(mod_u, maps[t])
    s_dim = maps[t].dst.dim
    cols = []
    for k in red.free:
        i, j = divmod(k, s_dim)
        v = m.basis[i][m.blocks[t]]
        cols.append((sheaf.fiber[t].act(maps[t].dst.basis(j)) @ v) % sp.p)
    mat = np.array(cols, dtype=np.int64).T.reshape(sheaf.fiber[t].dim, len(cols)) if cols else la.zeros(sheaf.fiber[t].dim, 0)
    return tens.dim, mat


def _module_action(sheaf, m, alg, maps):
    p = sheaf.base.p
    act = np.zeros((alg.dim, m.dim, m.dim), dtype=np.int64)
    for k in range(alg.dim):
        a = alg.basis(k)
        cols = []
        for v in m.basis:
            w = np.zeros_like(v)
            for t in m.points:
                w[m.blocks[t]] = sheaf.fiber[t].act(maps[t](a)) @ v[m.blocks[t]]
            cols.append(m.coords(w % p))
        if cols:
            act[k] = np.array(cols, dtype=np.int64).T
    return act
