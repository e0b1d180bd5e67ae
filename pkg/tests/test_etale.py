from itertools import product as iproduct

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from schfin.errors import NotConnected, NotEtale, NotPwConnected, SizeBound
from schfin.etale import (
    CoverMorphism,
    aut_group,
    degree,
    extend_scalars,
    fib,
    fib_map,
    galois_axioms_report,
    hom_set,
    identity_morphism,
    image_factorization,
    index_map_morphism,
    is_epi,
    is_etale_cover,
    is_galois,
    is_mono,
    local_ranks,
    product_cover,
    pullback_cover,
    pushforward_cover,
    quotient_by_group,
    split_diagonal,
    structure_cover,
    structure_morphism,
    tensor_over_base,
    trivial_cover,
    trivialize,
    verify_certificate,
)
from schfin.finalg import OmegaTower, prime_field
from schfin.points import geometric_fiber, geometric_points, schematic_points
from schfin.pwconn import is_well_connected, pw_space
from schfin.rspace import is_qc_isomorphism, relspec
from schfin.samples import chain_collapse, point, v_space

from corpus import DUAL, brute_algebra_homs, random_projection_space

T2 = OmegaTower(2, 12)
T3 = OmegaTower(3, 6)
X0 = point(prime_field(2))
(GP0,) = geometric_points(X0, T2)


def field_cover(space, d, tower=T2):
    return extend_scalars(space, tower.field(d), name=f"F{space.p}^{d}")


# -- examples ---------------------------------------------------------------


def test_is_etale_cover_examples():
    assert is_etale_cover(X0, field_cover(X0, 2).sheaf)
    assert not is_etale_cover(X0, extend_scalars(X0, DUAL).sheaf)
    X = v_space()
    assert is_etale_cover(X, trivial_cover(X, 3).sheaf)
    with pytest.raises(NotEtale):
        from schfin.etale import EtaleCover

        EtaleCover(X0, extend_scalars(X0, DUAL).sheaf)


def test_degree_examples():
    assert degree(field_cover(X0, 2)) == 2
    assert degree(trivial_cover(X0, 4)) == 4
    assert degree(trivial_cover(X0, 0)) == 0
    with pytest.raises(NotPwConnected):
        degree(structure_cover(v_space()))


def test_fib_examples():
    f = fib(field_cover(X0, 2), GP0, T2)
    assert len(f) == 2 and f.frobenius == [1, 0]
    a = product_cover(field_cover(X0, 2), structure_cover(X0)).cover
    f = fib(a, GP0, T2)
    assert len(f) == 3 and f.cycle_type() == [1, 2]
    assert len(fib(structure_cover(X0), GP0, T2)) == 1


def test_hom_examples():
    a4 = field_cover(X0, 2)
    homs = hom_set(a4, a4)
    assert len(homs) == 2 and identity_morphism(a4) in homs
    g = aut_group(a4)
    assert g.order == 2 and g.is_abelian()
    assert hom_set(a4, structure_cover(X0)) == []
    assert hom_set(structure_cover(X0), a4) == [structure_morphism(a4)]


def test_quotient_examples():
    a4 = field_cover(X0, 2)
    q = quotient_by_group(a4, aut_group(a4).elements).cover
    assert q.fiber("*").dim == 1 and q.structure("*").is_iso()
    q = quotient_by_group(a4, [identity_morphism(a4)]).cover
    assert q.fiber("*").dim == 2
    o2 = trivial_cover(X0, 2)
    swap = [g for g in aut_group(o2).elements if g != identity_morphism(o2)]
    q = quotient_by_group(o2, [identity_morphism(o2)] + swap)
    assert q.cover.fiber("*").dim == 1
    # the invariants are the diagonal
    assert q.inclusion.maps["*"].mat.T.tolist() == [[1, 1]]


def test_factorization_examples():
    pc = product_cover(field_cover(X0, 2), structure_cover(X0))
    fac = image_factorization(pc.projections[0])
    assert fac.image.fiber("*").dim == 2 and fac.complement.fiber("*").dim == 1
    assert is_epi(pc.projections[0]) and not is_mono(pc.projections[0])
    a4 = field_cover(X0, 2)
    fac = image_factorization(identity_morphism(a4))
    assert fac.complement.fiber("*").dim == 0
    o2 = product_cover(structure_cover(X0), structure_cover(X0))
    fac = image_factorization(o2.projections[1])
    assert fac.image.fiber("*").dim == 1 and fac.complement.fiber("*").dim == 1
    inc = structure_morphism(a4)
    assert is_mono(inc) and not is_epi(inc)
    assert is_mono(identity_morphism(a4)) and is_epi(identity_morphism(a4))


def test_split_diagonal_examples():
    s = split_diagonal(field_cover(X0, 2))
    assert s.complement.fiber("*").dim == 2
    s = split_diagonal(structure_cover(X0))
    assert s.complement.fiber("*").dim == 0 and not s.idempotent["*"].any()
    s = split_diagonal(trivial_cover(X0, 2))
    assert s.complement.fiber("*").dim == 2


def test_trivialize_examples():
    c = trivialize(field_cover(X0, 2))
    assert c.n == 2 and c.covering.fiber("*").dim == 2
    c = trivialize(trivial_cover(X0, 3))
    assert c.n == 3 and c.covering.fiber("*").dim == 1
    c = trivialize(product_cover(field_cover(X0, 2), structure_cover(X0)).cover)
    assert c.n == 3 and verify_certificate(c)


def test_galois_examples():
    a4, a8 = field_cover(X0, 2), field_cover(X0, 3)
    assert is_galois(a4) and aut_group(a4).order == 2
    g8 = aut_group(a8)
    assert is_galois(a8) and g8.order == 3
    assert all(g8.element_order(i) == 3 for i in range(3) if i != g8.identity)
    assert not is_galois(product_cover(a4, structure_cover(X0)).cover)


def test_galois_report_examples():
    rep = galois_axioms_report(X0, {"F4": field_cover(X0, 2)}, GP0, T2, max_degree=4)
    assert rep.ok and len(rep.axioms) == 5 and all(n > 0 for _, n in rep.counts().values())
    with pytest.raises(NotConnected):
        X = v_space()
        galois_axioms_report(X, {}, geometric_points(X, T2)[0], T2)


# -- corpus ------------------------------------------------------------------


def schematic_base(seed, p=2, well=False):
    from schfin.rspace import is_schematic_space

    rng = np.random.default_rng(seed)
    while True:
        X = random_projection_space(rng, p, max_points=3, max_locals=2)
        if X is None or not is_schematic_space(X):
            continue
        if well and not is_well_connected(X):
            continue
        return rng, X


def random_cover(rng, X, tower, max_parts=2):
    parts = []
    for _ in range(int(rng.integers(1, max_parts + 1))):
        d = int(rng.integers(1, 3))
        parts.append(extend_scalars(X, tower.field(d)) if d > 1 else structure_cover(X))
    return product_cover(*parts).cover if len(parts) > 1 else parts[0]


def brute_cover_homs(a, b):
    """Hom sets by trying every matrix at every point."""
    per = {}
    for x in a.points:
        per[x] = [m for m in brute_algebra_homs(a.fiber(x), b.fiber(x)) if m.compose(a.structure(x)) == b.structure(x)]
    out = []
    for choice in iproduct(*[per[x] for x in a.points]):
        f = CoverMorphism(a, b, dict(zip(a.points, choice)), check=False)
        if f.defect() is None:
            out.append(f)
    return out


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_hom_set_matches_brute_force(seed):
    rng, X = schematic_base(seed)
    a = random_cover(rng, X, T2, 1)
    b = random_cover(rng, X, T2, 2)
    if max(a.fiber(x).dim * b.fiber(x).dim for x in X.points) > 12:
        return
    assert set(hom_set(a, b)) == set(brute_cover_homs(a, b))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from([2, 3]))
def test_fiber_size_is_local_rank(seed, p):
    tower = T2 if p == 2 else T3
    rng, X = schematic_base(seed, p)
    a = random_cover(rng, X, tower)
    ranks = local_ranks(a)
    for gp in geometric_points(X, tower):
        top = gp.point.max_rep
        assert len(fib(a, gp, tower)) == ranks[(top.x, top.index)]


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_fiber_matches_geometric_fiber(seed):
    rng, X = schematic_base(seed)
    a = random_cover(rng, X, T2, 1)
    _, s = relspec(X, a.sheaf)
    for gp in geometric_points(X, T2):
        fs = geometric_fiber(s, gp, T2)
        # after splitting, one schematic point of the fiber per element of Fib
        assert len(fs.spec_points()[0]) == len(fib(a, gp, T2))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_aut_acts_on_fields(d):
    a = field_cover(X0, d)
    f = fib(a, GP0, T2)
    g = aut_group(a)
    actions = [tuple(fib_map(h, GP0, T2, f, f)) for h in g.elements]
    # faithful and transitive: a regular action
    assert len(set(actions)) == g.order == d == len(f)
    assert {act[0] for act in actions} == set(range(d))


def test_aut_action_not_transitive_for_non_galois():
    a = product_cover(field_cover(X0, 2), structure_cover(X0)).cover
    f = fib(a, GP0, T2)
    g = aut_group(a)
    orbit = {fib_map(h, GP0, T2, f, f)[0] for h in g.elements}
    assert len(orbit) < len(f) and not is_galois(a)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 3), st.integers(1, 3))
def test_homs_between_trivial_covers_come_from_index_maps(seed, m, n):
    _, X = schematic_base(seed, well=True)
    src, dst = trivial_cover(X, m), trivial_cover(X, n)
    induced = {index_map_morphism(src, dst, phi) for phi in iproduct(range(m), repeat=n)}
    assert len(induced) == m ** n
    assert set(hom_set(src, dst)) == induced


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_trivialization_certificates(seed):
    rng, X = schematic_base(seed, well=True)
    a = random_cover(rng, X, T2)
    c = trivialize(a)
    assert c.n == degree(a)
    assert verify_certificate(c)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_split_diagonal_properties(seed):
    rng, X = schematic_base(seed)
    a = random_cover(rng, X, T2)
    s = split_diagonal(a)
    ranks = set(local_ranks(a).values())
    assert all(m.is_iso() for m in s.iso.values())
    assert set(local_ranks(s.complement).values()) == {r - 1 for r in ranks}


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_quotients_represent_invariant_maps(seed):
    rng, X = schematic_base(seed)
    a = random_cover(rng, X, T2)
    g = aut_group(a)
    k = int(rng.integers(g.order))
    group = [g.elements[i] for i in g.generated([k])]
    q = quotient_by_group(a, group)
    for d in [structure_cover(X), random_cover(rng, X, T2, 1)]:
        try:
            homs = hom_set(d, a, bound=5000)
        except SizeBound:
            assume(False)
        inv = [u for u in homs if all(h.compose(u) == u for h in group)]
        assert len(hom_set(d, q.cover)) == len(inv)


def transport_profile(space, cover, tower):
    pts = schematic_points(space)
    ranks = local_ranks(cover)
    by_point = sorted(ranks[(pt.max_rep.x, pt.max_rep.index)] for pt in pts)
    fibs = sorted(len(fib(cover, gp, tower)) for gp in geometric_points(space, tower, pts))
    return is_etale_cover(space, cover.sheaf), by_point, fibs


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_transport_along_pw_projection(seed):
    rng, X = schematic_base(seed)
    a = random_cover(rng, X, T2)
    pi = pw_space(X).projection
    up = pullback_cover(pi, a)
    assert transport_profile(pi.src, up, T2) == transport_profile(X, a, T2)
    down = pushforward_cover(pi, up)
    assert transport_profile(X, down, T2) == transport_profile(X, a, T2)


def test_transport_along_collapse():
    c = chain_collapse()
    assert is_qc_isomorphism(c)
    for d in [1, 2]:
        a = field_cover(c.dst, d) if d > 1 else structure_cover(c.dst)
        up = pullback_cover(c, a)
        assert transport_profile(c.src, up, T2) == transport_profile(c.dst, a, T2)
        assert transport_profile(c.dst, pushforward_cover(c, up), T2) == transport_profile(c.dst, a, T2)


def test_tensor_over_base_multiplies_degree():
    t = tensor_over_base(field_cover(X0, 2), field_cover(X0, 3)).cover
    assert degree(t) == 6 and is_galois(t) and aut_group(t).order == 6
    t = tensor_over_base(field_cover(X0, 2), field_cover(X0, 2)).cover
    assert fib(t, GP0, T2).cycle_type() == [2, 2]
