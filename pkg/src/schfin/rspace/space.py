"""Ringed finite posets, sheaves of modules and algebras, and morphisms."""

import numpy as np

from .. import linalg as la
from ..errors import (
    BadShape,
    MixedCharacteristic,
    NotFunctorial,
    NotMorphism,
    NotMultiplicative,
    NotOpen,
    NotUnital,
    SchfinError,
    UnknownPoint,
)
from ..finalg import AlgebraMap, identity
from ..poset import MonotoneMap, Poset


class Report:
    """Outcome of a check: ``ok`` plus the first violation found."""

    __slots__ = ("ok", "code", "where", "message", "details")

    def __init__(self, ok, code="OK", where=None, message="", details=None):
        self.ok = ok
        self.code = code
        self.where = where
        self.message = message
        self.details = details or {}

    def __bool__(self):
        return self.ok

    def __repr__(self):
        if self.ok:
            return "Report(OK)"
        return f"Report({self.code} at {self.where}: {self.message})"


def _composites(poset, res, compose, ident, eq):
    """All restrictions x <= y from Hasse data; checks path independence.

    Returns (dict, report).
    """
    out = {}
    order = poset.topological_order()
    for x in order:
        out[(x, x)] = ident(x)
        for y in order:
            if y == x or not poset.le(x, y):
                continue
            cands = []
            for z in poset.lower_covers(y):
                if poset.le(x, z):
                    cands.append((z, compose(res[(z, y)], out[(x, z)])))
            first = cands[0][1]
            for z, c in cands[1:]:
                if not eq(first, c):
                    return out, Report(False, "NotFunctorial", (x, y), f"paths through {cands[0][0]} and {z} disagree")
            out[(x, y)] = first
    return out, Report(True)


def validate_space(poset, stalk, res):
    """Check the data of a ringed poset; returns a Report (never raises)."""
    for x in poset.elements:
        if x not in stalk:
            return Report(False, "MissingStalk", x, "no stalk given")
    ps = {stalk[x].p for x in poset.elements}
    if len(ps) > 1:
        return Report(False, "MixedCharacteristic", None, f"characteristics {sorted(ps)}")
    for e in poset.hasse:
        if e not in res:
            return Report(False, "MissingRestriction", e, "no restriction map given")
    for e in res:
        if e not in poset.hasse:
            return Report(False, "NotHasseEdge", e, "restriction given on a non-covering pair")
    for (lo, hi) in poset.hasse:
        r = res[(lo, hi)]
        if r.src != stalk[lo] or r.dst != stalk[hi]:
            return Report(False, "BadShape", (lo, hi), "restriction does not go between the stalks")
        try:
            AlgebraMap(r.src, r.dst, r.mat)
        except NotUnital:
            return Report(False, "NotUnital", (lo, hi), "restriction is not unital")
        except NotMultiplicative:
            return Report(False, "NotMultiplicative", (lo, hi), "restriction is not multiplicative")
    _, rep = _composites(
        poset,
        res,
        lambda a, b: a.compose(b),
        lambda x: identity(stalk[x]),
        lambda a, b: a == b,
    )
    return rep


_ERRORS = {
    "MixedCharacteristic": MixedCharacteristic,
    "NotFunctorial": NotFunctorial,
    "NotUnital": NotUnital,
    "NotMultiplicative": NotMultiplicative,
    "MissingStalk": UnknownPoint,
}


def _raise(rep):
    cls = _ERRORS.get(rep.code, BadShape)
    raise cls(f"{rep.code} at {rep.where}: {rep.message}", where=rep.where)


class RingedPoset:
    """A finite poset with an algebra at each point and restriction maps on Hasse edges."""

    def __init__(self, poset, stalk, res, check=True):
        self.poset = poset
        self.stalk = {x: stalk[x] for x in poset.elements}
        self.res = {e: res[e] for e in poset.hasse}
        if check:
            rep = validate_space(poset, stalk, res)
            if not rep.ok:
                _raise(rep)
        self._r = None
        self._memo = {}

    @property
    def p(self):
        for a in self.stalk.values():
            return a.p
        return None

    @property
    def points(self):
        return self.poset.elements

    def memo(self, name, fn):
        if name not in self._memo:
            self._memo[name] = fn(self)
        return self._memo[name]

    def r(self, x, y):
        """Restriction O_x -> O_y for x <= y."""
        if self._r is None:
            self._r, _ = _composites(
                self.poset,
                self.res,
                lambda a, b: a.compose(b),
                lambda z: identity(self.stalk[z]),
                lambda a, b: True,
            )
        try:
            return self._r[(x, y)]
        except KeyError:
            raise NotOpen(f"{x!r} is not below {y!r}") from None

    def subspace(self, points):
        """Open (or any) subspace with restricted structure."""
        sub = self.poset.induced(points)
        return RingedPoset(sub, {x: self.stalk[x] for x in sub}, {(a, b): self.r(a, b) for a, b in sub.hasse}, check=False)

    def structure_sheaf(self):
        return self.memo("structure_sheaf", lambda s: ModuleSheaf.structure_sheaf(s))

    def __repr__(self):
        return f"RingedPoset({len(self.poset)} points)"


def point_space(algebra, name="*"):
    return RingedPoset(Poset([name], []), {name: algebra}, {})


# -- modules ----------------------------------------------------------------


class Module:
    """Finite module over an algebra: ``action[k]`` is the matrix of e_k."""

    __slots__ = ("ring", "dim", "action")

    def __init__(self, ring, action, dim=None, check=True):
        act = np.array(action, dtype=np.int64)
        if act.size == 0:
            d = dim if dim is not None else 0
            act = np.zeros((ring.dim, d, d), dtype=np.int64)
        if act.ndim != 3 or act.shape[0] != ring.dim or act.shape[1] != act.shape[2]:
            raise BadShape("module action must have shape (ring dim, m, m)")
        self.ring = ring
        self.dim = act.shape[1]
        self.action = act % ring.p
        if check:
            self._validate()

    def _validate(self):
        p, r = self.ring.p, self.ring
        if not (self.act(r.one) == la.eye(self.dim)).all():
            raise NotUnital("unit does not act as the identity")
        for i in range(r.dim):
            for j in range(r.dim):
                if not ((self.action[i] @ self.action[j]) % p == self.act(r.mul[i, j])).all():
                    raise NotMultiplicative("action is not multiplicative")

    def act(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.ring.dim == 0:
            return la.zeros(self.dim, self.dim)
        return np.einsum("k,kij->ij", a, self.action) % self.ring.p

    @classmethod
    def regular(cls, algebra):
        act = np.array([algebra.lmat(algebra.basis(k)) for k in range(algebra.dim)], dtype=np.int64)
        return cls(algebra, act.reshape(algebra.dim, algebra.dim, algebra.dim), dim=algebra.dim, check=False)

    @classmethod
    def zero(cls, ring):
        return cls(ring, np.zeros((ring.dim, 0, 0)), dim=0, check=False)

    def restrict_scalars(self, phi):
        """View a module over phi.dst as a module over phi.src."""
        act = np.array([self.act(phi(phi.src.basis(k))) for k in range(phi.src.dim)], dtype=np.int64)
        return Module(phi.src, act.reshape(phi.src.dim, self.dim, self.dim), dim=self.dim, check=False)


def module_tensor(m, phi):
    """M (x)_R S for a module M over R and phi: R -> S.

    Returns (module over S, matrix of m -> m (x) 1, quotient reducer).
    """
    s = phi.dst
    p = s.p
    n = m.dim * s.dim
    rels = []
    i_s, i_m = la.eye(s.dim), la.eye(m.dim)
    for k in range(phi.src.dim):
        ls = s.lmat(phi(phi.src.basis(k)))
        rels.append(((np.kron(m.action[k], i_s) - np.kron(i_m, ls)) % p).T)
    red = la.Reducer(np.vstack(rels) if rels else la.zeros(0, n), n, p)
    sect = red.section()
    proj = red.projection()
    act = []
    for k in range(s.dim):
        full = np.kron(i_m, s.lmat(s.basis(k)))
        act.append((proj @ full @ sect) % p)
    q = len(red.free)
    act = np.array(act, dtype=np.int64).reshape(s.dim, q, q)
    unit = (proj @ np.kron(i_m, s.one.reshape(-1, 1))) % p
    return Module(s, act, dim=q, check=False), unit, red


class ModuleSheaf:
    """Sheaf of modules on a ringed poset, given on Hasse edges."""

    def __init__(self, base, fiber, res, check=True):
        self.base = base
        self.fiber = {x: fiber[x] for x in base.points}
        self.res = {e: np.array(res[e], dtype=np.int64).reshape(self.fiber[e[1]].dim, self.fiber[e[0]].dim) % base.p for e in base.poset.hasse}
        self._r = None
        if check:
            rep = self.validate()
            if not rep.ok:
                _raise(rep)

    @classmethod
    def structure_sheaf(cls, space):
        fiber = {x: Module.regular(space.stalk[x]) for x in space.points}
        return cls(space, fiber, {e: space.res[e].mat for e in space.poset.hasse}, check=False)

    @classmethod
    def zero(cls, space):
        fiber = {x: Module.zero(space.stalk[x]) for x in space.points}
        return cls(space, fiber, {e: la.zeros(0, 0) for e in space.poset.hasse}, check=False)

    def validate(self):
        sp = self.base
        p = sp.p
        for x in sp.points:
            if self.fiber[x].ring != sp.stalk[x]:
                return Report(False, "BadShape", x, "fiber is not a module over the stalk")
        for (lo, hi) in sp.poset.hasse:
            m = self.res[(lo, hi)]
            r = sp.res[(lo, hi)]
            for k in range(sp.stalk[lo].dim):
                a = sp.stalk[lo].basis(k)
                lhs = (m @ self.fiber[lo].act(a)) % p
                rhs = (self.fiber[hi].act(r(a)) @ m) % p
                if not (lhs == rhs).all():
                    return Report(False, "NotSemilinear", (lo, hi), "restriction is not compatible with the ring maps")
        _, rep = _composites(
            sp.poset,
            self.res,
            lambda a, b: (a @ b) % p,
            lambda z: la.eye(self.fiber[z].dim),
            lambda a, b: a.shape == b.shape and bool((a == b).all()),
        )
        return rep

    def r(self, x, y):
        if self._r is None:
            p = self.base.p
            self._r, _ = _composites(
                self.base.poset,
                self.res,
                lambda a, b: (a @ b) % p,
                lambda z: la.eye(self.fiber[z].dim),
                lambda a, b: True,
            )
        return self._r[(x, y)]


class QcohAlgebra:
    """Sheaf of algebras over a ringed poset with structure maps O_x -> A_x."""

    def __init__(self, base, fiber, structure, res, check=True):
        self.base = base
        self.fiber = {x: fiber[x] for x in base.points}
        self.structure = {x: structure[x] for x in base.points}
        self.res = {e: res[e] for e in base.poset.hasse}
        self._space = None
        if check:
            rep = self.validate()
            if not rep.ok:
                _raise(rep)

    def validate(self):
        sp = self.base
        for x in sp.points:
            s = self.structure[x]
            if s.src != sp.stalk[x] or s.dst != self.fiber[x]:
                return Report(False, "BadShape", x, "structure map does not go from the stalk to the fiber")
        for e in sp.poset.hasse:
            r = self.res[e]
            if r.src != self.fiber[e[0]] or r.dst != self.fiber[e[1]]:
                return Report(False, "BadShape", e, "restriction does not go between the fibers")
            lhs = r.compose(self.structure[e[0]])
            rhs = self.structure[e[1]].compose(sp.res[e])
            if lhs != rhs:
                return Report(False, "NotCompatible", e, "restriction does not commute with the structure maps")
        return validate_space(sp.poset, self.fiber, self.res)

    def as_space(self):
        """The ringed poset (X, A)."""
        if self._space is None:
            self._space = RingedPoset(self.base.poset, self.fiber, self.res, check=False)
        return self._space

    def r(self, x, y):
        return self.as_space().r(x, y)

    def as_module_sheaf(self):
        fiber = {x: Module.regular(self.fiber[x]).restrict_scalars(self.structure[x]) for x in self.base.points}
        return ModuleSheaf(self.base, fiber, {e: self.res[e].mat for e in self.base.poset.hasse}, check=False)

    @classmethod
    def structure_sheaf(cls, space):
        return cls(space, space.stalk, {x: identity(space.stalk[x]) for x in space.points}, space.res, check=False)


class SpaceMorphism:
    """Morphism of ringed posets: a monotone map plus comorphisms O_{Y,f(x)} -> O_{X,x}."""

    def __init__(self, src, dst, assignment, comorphism, check=True):
        self.src = src
        self.dst = dst
        self.map = MonotoneMap(src.poset, dst.poset, assignment, check=check)
        self.comorphism = {x: comorphism[x] for x in src.points}
        if check:
            rep = self.validate()
            if not rep.ok:
                raise NotMorphism(f"{rep.code} at {rep.where}: {rep.message}", where=rep.where)

    def validate(self):
        X, Y = self.src, self.dst
        for x in X.points:
            c = self.comorphism[x]
            if c.src != Y.stalk[self(x)] or c.dst != X.stalk[x]:
                return Report(False, "BadShape", x, "comorphism has the wrong source or target")
        for lo, hi in X.poset.hasse:
            lhs = X.res[(lo, hi)].compose(self.comorphism[lo])
            rhs = self.comorphism[hi].compose(Y.r(self(lo), self(hi)))
            if lhs != rhs:
                return Report(False, "NotCompatible", (lo, hi), "comorphisms do not commute with restrictions")
        return Report(True)

    def __call__(self, x):
        return self.map(x)

    def preimage(self, points):
        return self.map.preimage(points)

    def compose(self, other):
        """self after other."""
        co = {x: other.comorphism[x].compose(self.comorphism[other(x)]) for x in other.src.points}
        return SpaceMorphism(other.src, self.dst, {x: self(other(x)) for x in other.src.points}, co, check=False)

    def __eq__(self, other):
        return (
            isinstance(other, SpaceMorphism)
            and self.map.assignment == other.map.assignment
            and all(self.comorphism[x] == other.comorphism[x] for x in self.src.points)
        )

    def __hash__(self):
        return hash(tuple(sorted((str(k), str(v)) for k, v in self.map.assignment.items())))

    @property
    def pullback_ring(self):
        """Composite O_{Y,y} -> O_{X,x} for y <= f(x)."""
        return lambda y, x: self.comorphism[x].compose(self.dst.r(y, self(x)))


def identity_morphism(space):
    return SpaceMorphism(space, space, {x: x for x in space.points}, {x: identity(space.stalk[x]) for x in space.points}, check=False)


def check_or_raise(exc_cls, ok, message):
    if not ok:
        raise exc_cls(message)


__all__ = [
    "Module",
    "ModuleSheaf",
    "QcohAlgebra",
    "Report",
    "RingedPoset",
    "SchfinError",
    "SpaceMorphism",
    "identity_morphism",
    "module_tensor",
    "point_space",
    "validate_space",
]
