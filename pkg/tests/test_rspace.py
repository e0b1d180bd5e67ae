import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schfin import linalg as la
from schfin.errors import MixedCharacteristic, NotFiniteSpace, NotOpen, NotSchematic, NotUnital
from schfin.finalg import AlgebraMap, identity, is_epimorphism, is_flat, ideal_generated, prime_field, product, quotient
from schfin.poset import Poset
from schfin.rspace import (
    Module,
    ModuleSheaf,
    QcohAlgebra,
    RingedPoset,
    SpaceMorphism,
    affine_report,
    canonical_map,
    cohomology,
    cohomology_dims,
    cylinder,
    fiber_product,
    is_affine,
    is_affine_morphism,
    is_finite_space,
    is_finite_type,
    is_flat_immersion,
    is_qc_isomorphism,
    is_quasi_coherent,
    is_schematic_morphism,
    is_schematic_space,
    module_tensor,
    open_pushforward,
    pushforward_sheaf,
    relspec,
    schematic_report,
    section_algebra,
    sections,
    sheaf_complex,
    sheaf_from_module,
    stein_factorization,
    structure_complex,
    validate_space,
)
from schfin.rspace.cohomology import term_action
from schfin.samples import chain_collapse, chain_space, diagonal_chain, dual_chain, point, pseudocircle, v_space

from corpus import F2, F4, F2xF2, pr1, random_projection_space

# -- helpers ---------------------------------------------------------------


def doubled(space):
    """O x O as a quasi-coherent algebra."""
    fiber, structure, res = {}, {}, {}
    for x in space.points:
        a = space.stalk[x]
        prod, _ = product(a, a)
        fiber[x] = prod
        structure[x] = AlgebraMap(a, prod, np.vstack([la.eye(a.dim)] * 2))
    for lo, hi in space.poset.hasse:
        m = space.res[(lo, hi)].mat
        z = la.zeros(*m.shape)
        res[(lo, hi)] = AlgebraMap(fiber[lo], fiber[hi], np.block([[m, z], [z, m]]))
    return QcohAlgebra(space, fiber, structure, res)


def schematic_oracle(space):
    """Cohomology first, then tensor: H^i(V) (x)_{O_y} O_{y'} -> H^i(V') over all x and y < y'."""
    P, p = space.poset, space.p
    for x in P.elements:
        ux = set(P.up(x))
        for y in P.elements:
            for y2 in P.up(y):
                if y2 == y:
                    continue
                v = [t for t in P.up(y) if t in ux]
                v2 = [t for t in P.up(y2) if t in ux]
                big, small = structure_complex(space, v), structure_complex(space, v2)
                r, s = space.stalk[y], space.stalk[y2]
                for i in range(max(big.length, 1)):
                    h, h2 = big.cohomology(i), small.cohomology(i)
                    acts = [h.action(term_action(big, i, lambda t: space.stalk[t].lmat(space.r(y, t)(r.basis(k))))) for k in range(r.dim)]
                    mod = Module(r, np.array(acts).reshape(r.dim, h.dim, h.dim), dim=h.dim)
                    tens, _, red = module_tensor(mod, space.r(y, y2))
                    if tens.dim != h2.dim:
                        return False
                    if h2.dim == 0:
                        continue
                    # the cochain restriction C(V) -> C(V') followed by the O_{y'} action
                    index = {c: o for c, o, _ in big.blocks[i]} if i < big.length else {}
                    cols = []
                    for k in red.free:
                        a, j = divmod(k, s.dim)
                        z = h.reps[a]
                        w = la.zeros(1, small.dim(i))[0]
                        for c, o, sz in small.blocks[i]:
                            t = c[0]
                            w[o : o + sz] = space.stalk[t].lmat(space.r(y2, t)(s.basis(j))) @ z[index[c] : index[c] + sz]
                        cols.append(h2.coordinates(w % p))
                    if la.rank(np.array(cols).T, p) != h2.dim:
                        return False
    return True


def random_spaces(seed, p=None, count=1):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        X = random_projection_space(rng, p or int(rng.choice([2, 3])))
        if X is not None:
            out.append(X)
    return rng, out


# -- validation --------------------------------------------------------------


def test_validate_space_examples():
    X = v_space()
    assert validate_space(X.poset, X.stalk, X.res).ok
    bad = AlgebraMap(F2xF2, F2, [[1, 0]], check=False)
    bad.mat = np.array([[0, 0]])
    rep = validate_space(X.poset, X.stalk, {**X.res, ("a", "b1"): bad})
    assert rep.code == "NotUnital" and rep.where == ("a", "b1")
    with pytest.raises(NotUnital):
        RingedPoset(X.poset, X.stalk, {**X.res, ("a", "b1"): bad})
    f3 = prime_field(3)
    rep = validate_space(X.poset, {**X.stalk, "b2": f3}, X.res)
    assert rep.code == "MixedCharacteristic"
    with pytest.raises(MixedCharacteristic):
        RingedPoset(X.poset, {**X.stalk, "b2": f3}, X.res)


def test_functoriality_violation_reported():
    P = Poset(["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
    stalk = {"a": F2xF2, "b": F2xF2, "c": F2xF2, "d": F2xF2}
    swap = AlgebraMap(F2xF2, F2xF2, [[0, 1], [1, 0]])
    one = identity(F2xF2)
    rep = validate_space(P, stalk, {("a", "b"): one, ("a", "c"): one, ("b", "d"): one, ("c", "d"): swap})
    assert rep.code == "NotFunctorial"


def test_is_finite_space_examples():
    assert is_finite_space(v_space())
    assert not is_finite_space(dual_chain())
    assert is_finite_space(point(F4))


# -- sheaves ----------------------------------------------------------------


def test_quasi_coherence_examples():
    X = chain_space()
    assert is_quasi_coherent(X.structure_sheaf())
    # F_2 as a module over the second factor, zero restriction
    second = Module(F2xF2, [[[0]], [[1]]])
    b = Module(F2, [[[1]]])
    M = ModuleSheaf(X, {"a": second, "b": b}, {("a", "b"): [[0]]})
    assert not is_quasi_coherent(M)
    n, _ = canonical_map(M, "a", "b")
    assert n == 0
    Z = ModuleSheaf.zero(X)
    assert is_quasi_coherent(Z) and is_finite_type(Z)


def test_sections_examples():
    X = v_space()
    s = sections(X, X.points)
    assert s.dim == 2
    alg, maps, _ = section_algebra(X, X.points)
    from schfin.finalg import local_decomposition

    assert [f.dim for f in local_decomposition(alg).factors] == [1, 1]
    for x in X.points:
        assert sections(X, X.poset.up(x)).dim == X.stalk[x].dim
    assert sections(X, []).dim == 0
    with pytest.raises(NotOpen):
        sections(X, ["a"])


def test_cohomology_examples():
    C = pseudocircle()
    assert cohomology_dims(C, C.points) == [1, 1]
    X = v_space()
    for x in X.points:
        assert cohomology_dims(X, X.poset.up(x))[0] == X.stalk[x].dim
        assert all(d == 0 for d in cohomology_dims(X, X.poset.up(x))[1:])
    Z = ModuleSheaf.zero(C)
    assert all(h.dim == 0 for h in cohomology(Z, C.points))


# -- schematic ----------------------------------------------------------------


def test_schematic_examples():
    assert is_schematic_space(v_space())
    assert not is_schematic_space(diagonal_chain())
    rep = schematic_report(pseudocircle())
    assert not rep.ok
    assert rep.details == {"x": "y1", "edge": ("x1", "y2"), "degree": 0}
    with pytest.raises(NotFiniteSpace):
        is_schematic_space(dual_chain())


def test_affine_examples():
    X = v_space()
    rep = affine_report(X)
    assert rep.ok and rep.criterion == "minimal-open"
    for x in X.points:
        assert is_affine(X, X.poset.up(x))
    with pytest.raises(NotSchematic):
        is_affine(pseudocircle())


def test_morphism_examples():
    c = chain_collapse()
    assert is_schematic_morphism(c)
    assert is_affine_morphism(c) and is_qc_isomorphism(c)
    X = v_space()
    ident = SpaceMorphism(X, X, {x: x for x in X.points}, {x: identity(X.stalk[x]) for x in X.points})
    assert is_qc_isomorphism(ident)
    top, s = relspec(X, doubled(X))
    assert is_affine_morphism(s) and not is_qc_isomorphism(s)


def test_fiber_product_examples():
    F2pt = point(F2)
    F4pt = point(F4)
    inc = AlgebraMap(F2, F4, [[1], [0]])
    f = SpaceMorphism(F4pt, F2pt, {"*": "*"}, {"*": inc})
    fp = fiber_product(f, f)
    assert len(fp.space.points) == 1 and fp.space.stalk["(*,*)"].dim == 4
    X = v_space()
    ident = SpaceMorphism(X, X, {x: x for x in X.points}, {x: identity(X.stalk[x]) for x in X.points})
    fp = fiber_product(ident, ident)
    assert len(fp.space.points) == 3
    assert all(fp.space.stalk[q] == X.stalk[fp.pairs[q][1]] for q in fp.space.points)
    c = chain_collapse()
    fp = fiber_product(c, c)
    # four points: the stalk at (b,b) is F_2 (x)_{F_2 x F_2} F_2 = F_2 along pr1 twice
    assert len(fp.space.points) == 4
    assert is_schematic_space(fp.space) and is_affine(fp.space)
    assert section_algebra(fp.space, fp.space.points)[0].dim == 2


def test_stein_examples():
    inc = AlgebraMap(F2, F4, [[1], [0]])
    f = SpaceMorphism(point(F4), point(F2), {"*": "*"}, {"*": inc})
    st_ = stein_factorization(f)
    assert st_.space.stalk["*"].dim == F4.dim and st_.f_prime.comorphism["*"].is_iso()
    c = chain_collapse()
    st_ = stein_factorization(c)
    assert st_.rho.comorphism["*"].is_iso() and st_.f_prime_qc_iso
    X = v_space()
    _, s = relspec(X, doubled(X))
    st_ = stein_factorization(s)
    assert all(st_.space.stalk[x].dim == 2 * X.stalk[x].dim for x in X.points)
    assert st_.f_prime_qc_iso
    assert st_.rho.compose(st_.f_prime) == s


def test_relspec_examples():
    inc = AlgebraMap(F2, F4, [[1], [0]])
    X0 = point(F2)
    A = QcohAlgebra(X0, {"*": F4}, {"*": inc}, {})
    top, s = relspec(X0, A)
    assert top.stalk["*"] == F4 and s.comorphism["*"] == inc
    X = v_space()
    top, s = relspec(X, QcohAlgebra.structure_sheaf(X))
    assert all(s.comorphism[x].is_iso() for x in X.points)
    top, s = relspec(X, doubled(X))
    assert is_schematic_space(top)
    assert all(top.stalk[x].dim == 2 * X.stalk[x].dim for x in X.points)


def test_open_pushforward_examples():
    X = v_space()
    J = open_pushforward(X, X.points, X.structure_sheaf())
    assert [J.fiber[x].dim for x in X.points] == [2, 1, 1]
    J = open_pushforward(X, ["b1"], X.subspace(["b1"]).structure_sheaf())
    assert [J.fiber[x].dim for x in X.points] == [1, 1, 0]
    assert is_quasi_coherent(J)
    J = open_pushforward(X, [], X.subspace([]).structure_sheaf())
    assert all(J.fiber[x].dim == 0 for x in X.points)
    with pytest.raises(NotOpen):
        open_pushforward(X, ["a"], X.subspace(["a"]).structure_sheaf())


def test_cylinder_examples():
    ident = SpaceMorphism(point(F2), point(F2), {"*": "*"}, {"*": identity(F2)})
    assert is_flat_immersion(ident)
    f = SpaceMorphism(point(F2), point(F2xF2), {"*": "*"}, {"*": pr1})
    cyl = cylinder(f)
    assert len(cyl.poset.hasse) == 1 and is_flat_immersion(f)
    inc = AlgebraMap(F2, F4, [[1], [0]])
    g = SpaceMorphism(point(F4), point(F2), {"*": "*"}, {"*": inc})
    assert not is_flat_immersion(g)


# -- properties --------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_schematic_matches_oracle(seed):
    _, (X,) = random_spaces(seed)
    assert is_schematic_space(X) == schematic_oracle(X)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_schematic_implies_flat_epimorphisms(seed):
    _, (X,) = random_spaces(seed)
    if is_schematic_space(X):
        for x in X.points:
            for y in X.poset.up(x):
                r = X.r(x, y)
                assert is_flat(r) and is_epimorphism(r)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_complex_and_h0(seed):
    _, (X,) = random_spaces(seed)
    for x in X.points:
        u = X.poset.up(x)
        cx = structure_complex(X, u)
        assert cx.is_complex()
        assert cx.cohomology(0).dim == sections(X, u).dim
    cx = structure_complex(X, X.points)
    assert cx.is_complex() and cx.cohomology(0).dim == sections(X, X.points).dim
    longest = max(X.poset.height(t) for t in X.points)
    assert cx.length == longest + 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_minimal_opens_acyclic_on_schematic(seed):
    _, (X,) = random_spaces(seed)
    if not is_schematic_space(X):
        return
    for x in X.points:
        dims = cohomology_dims(X, X.poset.up(x))
        assert dims[0] == X.stalk[x].dim and all(d == 0 for d in dims[1:])
        assert affine_report(X, X.poset.up(x), check_schematic=False).ok


def random_module(rng, alg):
    """Direct sum of cyclic modules A/(a) for random elements a."""
    parts = []
    for _ in range(int(rng.integers(1, 3))):
        gen = rng.integers(0, alg.p, size=alg.dim) if rng.random() < 0.7 else alg.zero()
        q, g = quotient(alg, ideal_generated(alg, [gen]))
        parts.append((q, g))
    dim = sum(q.dim for q, _ in parts)
    act = np.zeros((alg.dim, dim, dim), dtype=np.int64)
    for k in range(alg.dim):
        o = 0
        for q, g in parts:
            act[k, o : o + q.dim, o : o + q.dim] = q.lmat(g(alg.basis(k)))
            o += q.dim
    return Module(alg, act, dim=dim)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_generated_sheaves_on_affine(seed):
    rng, (X,) = random_spaces(seed)
    if not (is_schematic_space(X) and is_affine(X)):
        return
    alg, _, _ = section_algebra(X, X.points)
    if alg.dim == 0:
        return
    M = sheaf_from_module(X, random_module(rng, alg))
    assert M.validate().ok
    assert is_quasi_coherent(M)
    # M(X) (x) O_x -> M_x is an isomorphism
    from schfin.rspace.sections import fiber_map

    alg, maps, _ = section_algebra(X, X.points)
    s = sections(M, X.points)
    for x in X.points:
        n, mat = fiber_map(s, alg, maps, x, M)
        assert n == M.fiber[x].dim and la.rank(mat, X.p) == n
    dims = cohomology_dims(M, X.points)
    assert all(d == 0 for d in dims[1:])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_quasi_coherence_on_comparable_pairs(seed):
    rng, (X,) = random_spaces(seed)
    alg, _, _ = section_algebra(X, X.points)
    if alg.dim == 0:
        return
    M = sheaf_from_module(X, random_module(rng, alg))
    if not is_quasi_coherent(M):
        return
    for x in X.points:
        for y in X.poset.up(x):
            n, mat = canonical_map(M, x, y)
            assert n == M.fiber[y].dim and la.rank(mat, X.p) == n


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_qc_isomorphisms_preserve_cohomology(seed):
    # Stein factorization of the collapse to a point is a qc-isomorphism on affine spaces
    rng, (X,) = random_spaces(seed)
    if not (is_schematic_space(X) and is_affine(X)):
        return
    alg, maps, _ = section_algebra(X, X.points)
    if alg.dim == 0:
        return
    target = point(alg)
    f = SpaceMorphism(X, target, {x: "*" for x in X.points}, maps)
    assert is_qc_isomorphism(f)
    M = sheaf_from_module(X, random_module(rng, alg))
    N = pushforward_sheaf(f, M)
    hx = cohomology_dims(M, X.points)
    hy = cohomology_dims(N, target.points)
    assert hy[0] == hx[0] and all(d == 0 for d in hx[1:])


def test_qc_iso_transport_on_chain_collapse():
    c = chain_collapse()
    M = c.src.structure_sheaf()
    assert cohomology_dims(pushforward_sheaf(c, M), ["*"]) == [2]
    assert cohomology_dims(M, c.src.points) == [2, 0]
    assert sheaf_complex(M, c.src.points).is_complex()
