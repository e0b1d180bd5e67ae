"""Structural predicates: finite, quasi-coherent, schematic, affine, qc-isomorphism."""

import numpy as np

from .. import linalg as la
from ..errors import NotFiniteSpace, NotSchematic, NotSchematicMorphism
from ..finalg import AlgebraMap, identity, is_epimorphism, is_faithfully_flat, is_flat, tensor_map, tensor_over, tensor_product_map
from .cohomology import chain_map, induced_is_iso, standard_complex, structure_complex
from .sections import canonical_map, global_to_stalks, section_algebra
from .space import Report


def is_finite_space(space):
    return all(is_flat(r) for r in space.res.values())


def is_quasi_coherent(sheaf):
    for x, y in sheaf.base.poset.hasse:
        n, mat = canonical_map(sheaf, x, y)
        m = sheaf.fiber[y].dim
        if n != m or la.rank(mat, sheaf.base.p) != m:
            return False
    return True


def is_finite_type(sheaf):
    for x, y in sheaf.base.poset.hasse:
        _, mat = canonical_map(sheaf, x, y)
        if la.rank(mat, sheaf.base.p) != sheaf.fiber[y].dim:
            return False
    return True


def is_qcoh_algebra(alg):
    return is_quasi_coherent(alg.as_module_sheaf())


def _fixed_order(poset):
    return sorted(poset.elements, key=lambda z: (-poset.height(z), poset.index[z]))


def _comparison_degree(space, v, v2, rho, act, act2):
    """First degree where C(v) (x)_R R' -> C(v2) fails to be a quasi-iso, or None.

    ``act(t)``: R -> O_t on v and ``act2(t)``: R' -> O_t on v2 with
    act2(t) . rho = act(t).
    """
    poset, p = space.poset, space.p
    tens = {t: tensor_over(act(t), rho) for t in v}
    one = identity(rho.dst)
    k = standard_complex(
        poset,
        v,
        lambda t: tens[t].algebra.dim,
        lambda s, t: tensor_map(tens[s], tens[t], space.r(s, t), one).mat,
        p,
    )
    l = structure_complex(space, v2)
    phi = chain_map(k, l, lambda c: tensor_product_map(tens[c[0]], identity(space.stalk[c[0]]), act2(c[0])).mat)
    for i in range(max(k.length, l.length, 1)):
        if not induced_is_iso(k, l, phi, i):
            return i
    return None


def schematic_report(space):
    """Schematic check for a space; the report names the first failure."""
    if not is_finite_space(space):
        raise NotFiniteSpace("some restriction is not flat")
    poset = space.poset
    for e in poset.hasse:
        if not is_epimorphism(space.res[e]):
            return Report(False, "NotEpimorphism", e, "restriction is not an epimorphism", {"edge": e})
    for x in _fixed_order(poset):
        ux = set(poset.up(x))
        for y, y2 in poset.hasse:
            v = [t for t in poset.up(y) if t in ux]
            v2 = [t for t in poset.up(y2) if t in ux]
            i = _comparison_degree(
                space,
                v,
                v2,
                space.res[(y, y2)],
                lambda t, y=y: space.r(y, t),
                lambda t, y2=y2: space.r(y2, t),
            )
            if i is not None:
                return Report(
                    False,
                    "NotSchematic",
                    (x, (y, y2), i),
                    f"H^{i} comparison fails over U_{x} and edge {y}<{y2}",
                    {"x": x, "edge": (y, y2), "degree": i},
                )
    return Report(True)


def is_schematic_space(space):
    return schematic_report(space).ok


def morphism_report(f):
    """Schematic check for a morphism; both slots move along Hasse edges."""
    X, Y = f.src, f.dst
    if not (is_finite_space(X) and is_finite_space(Y)):
        raise NotFiniteSpace("some restriction is not flat")
    px, py = X.poset, Y.poset
    pull = f.pullback_ring
    # moving slot in X: x < x' with y fixed
    for y in _fixed_order(py):
        w = set(f.preimage(py.up(y)))
        for x, x2 in px.hasse:
            v = [t for t in px.up(x) if t in w]
            v2 = [t for t in px.up(x2) if t in w]
            i = _comparison_degree(X, v, v2, X.res[(x, x2)], lambda t, x=x: X.r(x, t), lambda t, x2=x2: X.r(x2, t))
            if i is not None:
                return Report(
                    False,
                    "NotSchematicMorphism",
                    (y, (x, x2), i),
                    f"H^{i} comparison fails for y={y} along {x}<{x2}",
                    {"y": y, "edge": (x, x2), "degree": i, "slot": "x"},
                )
    # moving slot in Y: y < y' with x fixed
    for x in _fixed_order(px):
        ux = set(px.up(x))
        for y, y2 in py.hasse:
            v = [t for t in f.preimage(py.up(y)) if t in ux]
            v2 = [t for t in f.preimage(py.up(y2)) if t in ux]
            i = _comparison_degree(X, v, v2, Y.res[(y, y2)], lambda t, y=y: pull(y, t), lambda t, y2=y2: pull(y2, t))
            if i is not None:
                return Report(
                    False,
                    "NotSchematicMorphism",
                    (x, (y, y2), i),
                    f"H^{i} comparison fails for x={x} along {y}<{y2}",
                    {"x": x, "edge": (y, y2), "degree": i, "slot": "y"},
                )
    return Report(True)


def is_schematic_morphism(f):
    return morphism_report(f).ok


class AffineReport:
    """Affineness data: acyclicity, faithful flatness, and the criterion used.

    ``criterion`` is "minimal-open" when U has a minimum, "inside-minimal-open"
    when U lies in some U_x, and "general" otherwise (the characterization
    is only known to be necessary in that case).
    """

    __slots__ = ("ok", "acyclic", "faithfully_flat", "criterion", "cohomology")

    def __init__(self, ok, acyclic, faithfully_flat, criterion, cohomology):
        self.ok = ok
        self.acyclic = acyclic
        self.faithfully_flat = faithfully_flat
        self.criterion = criterion
        self.cohomology = cohomology

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return f"AffineReport(ok={self.ok}, criterion={self.criterion!r}, H={self.cohomology})"


def affine_report(space, u=None, check_schematic=True):
    """Affineness of an open set u (default: the whole space)."""
    poset = space.poset
    u = poset.sort(poset.elements if u is None else u)
    if check_schematic and not is_schematic_space(space):
        raise NotSchematic("affineness is decided on schematic spaces")
    cx = structure_complex(space, u)
    dims = [cx.cohomology(i).dim for i in range(max(cx.length, 1))]
    acyclic = all(d == 0 for d in dims[1:])
    ff = is_faithfully_flat(global_to_stalks(space, u)) if u else True
    if u and len(poset.minimal(u)) == 1:
        crit = "minimal-open"
    elif u and any(set(u) <= set(poset.up(x)) for x in poset.elements):
        crit = "inside-minimal-open"
    else:
        crit = "general"
    return AffineReport(acyclic and ff, acyclic, ff, crit, dims)


def is_affine(space, u=None):
    return affine_report(space, u).ok


def is_affine_morphism(f):
    if not is_schematic_morphism(f):
        raise NotSchematicMorphism("affineness of a morphism needs a schematic morphism")
    py = f.dst.poset
    return all(affine_report(f.src, f.preimage(py.up(y)), check_schematic=False).ok for y in py.elements)


def pushforward_map(f, y):
    """O_{Y,y} -> O_X(f^{-1}(U_y)) induced by the comorphisms."""
    X, Y = f.src, f.dst
    v = f.preimage(Y.poset.up(y))
    alg, maps, s = section_algebra(X, v)
    src = Y.stalk[y]
    cols = []
    for k in range(src.dim):
        vec = la.zeros(1, s.basis.shape[1])[0]
        for t in s.points:
            vec[s.blocks[t]] = f.pullback_ring(y, t)(src.basis(k))
        cols.append(s.coords(vec % X.p))
    mat = np.array(cols, dtype=np.int64).T.reshape(alg.dim, src.dim) if cols else la.zeros(alg.dim, 0)
    return AlgebraMap(src, alg, mat, check=False)


def is_qc_isomorphism(f):
    if not is_affine_morphism(f):
        return False
    return all(pushforward_map(f, y).is_iso() for y in f.dst.points)


__all__ = [
    "AffineReport",
    "affine_report",
    "is_affine",
    "is_affine_morphism",
    "is_finite_space",
    "is_finite_type",
    "is_qc_isomorphism",
    "is_qcoh_algebra",
    "is_quasi_coherent",
    "is_schematic_morphism",
    "is_schematic_space",
    "morphism_report",
    "pushforward_map",
    "schematic_report",
]
