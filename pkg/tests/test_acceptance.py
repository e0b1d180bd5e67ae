"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (the lines are printed even with capture on) or directly
with ``python tests/test_acceptance.py``.
"""

import functools
import os
import time
from itertools import product as iproduct

import numpy as np
import pytest

from schfin.errors import NotPwConnected
from schfin.etale import (
    aut_group,
    degree,
    extend_scalars,
    fib,
    galois_axioms_report,
    hom_set,
    index_map_morphism,
    is_etale_cover,
    local_ranks,
    product_cover,
    pullback_cover,
    pushforward_cover,
    structure_cover,
    trivial_cover,
    trivialize,
    verify_certificate,
)
from schfin.finalg import (
    OmegaTower,
    idempotents_by_enumeration,
    idempotents_by_splitting,
    is_flat,
    is_flat_oracle,
    nilradical,
    nilradical_by_enumeration,
    nilradical_by_trace_form,
    prime_field,
)
from schfin.points import geometric_points, schematic_points
from schfin.pwconn import connectivity_profile, is_well_connected, pw_space, wc_components
from schfin.rspace import (
    SpaceMorphism,
    cohomology_dims,
    is_affine,
    is_qc_isomorphism,
    is_schematic_space,
    relspec,
    section_algebra,
    sheaf_from_module,
)
from schfin.samples import chain_collapse, chain_space, point, pseudocircle, v_space

from corpus import random_algebra, random_map, random_projection_space
from test_etale import brute_cover_homs
from test_rspace import random_module

TOWERS = {2: OmegaTower(2, 12), 3: OmegaTower(3, 6)}
README = os.path.join(os.path.dirname(__file__), "..", "README.md")


def line(n, ok, detail):
    return f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"


# -- corpus -------------------------------------------------------------------


def _named():
    X0 = point(prime_field(2))
    out = {
        "X0": X0,
        "X0_p3": point(prime_field(3)),
        "Xv": v_space(2),
        "Xv_p3": v_space(3),
        "chain": chain_space(2),
        "chain_p3": chain_space(3),
        "collapse_target": chain_collapse(2).dst,
        "collapse_target_p3": chain_collapse(3).dst,
    }
    for name, base, d in [("X0", X0, 2), ("chain", out["chain"], 2), ("Xv", out["Xv"], 2), ("X0_p3", out["X0_p3"], 2)]:
        cover = extend_scalars(base, TOWERS[base.p].field(d))
        out[f"relspec_F{base.p}^{d}_{name}"] = relspec(base, cover.sheaf)[0]
    return out


def _random(count, seed=2024):
    rng = np.random.default_rng(seed)
    out = {}
    while len(out) < count:
        p = 2 if len(out) % 2 == 0 else 3
        X = random_projection_space(rng, p, max_points=6, max_locals=3)
        if X is None or max(X.stalk[x].dim for x in X.points) > 4:
            continue
        if is_schematic_space(X):
            out[f"random{len(out)}_p{p}"] = X
    return out


@functools.lru_cache(maxsize=None)
def corpus():
    start = time.perf_counter()
    spaces = _named()
    spaces.update(_random(16))
    return spaces, time.perf_counter() - start


def random_cover(rng, X, max_parts=2):
    tower = TOWERS[X.p]
    parts = []
    for _ in range(int(rng.integers(1, max_parts + 1))):
        d = int(rng.integers(1, 3))
        parts.append(extend_scalars(X, tower.field(d)) if d > 1 else structure_cover(X))
    return product_cover(*parts).cover if len(parts) > 1 else parts[0]


def transport_profile(space, cover):
    """(etale?, rank at each schematic point, |fib| at each geometric point)."""
    tower = TOWERS[space.p]
    pts = schematic_points(space)
    ranks = local_ranks(cover)
    by_point = sorted(ranks[(pt.max_rep.x, pt.max_rep.index)] for pt in pts)
    fibs = sorted(len(fib(cover, gp, tower)) for gp in geometric_points(space, tower, pts))
    return is_etale_cover(space, cover.sheaf), by_point, fibs


def degree_profile(cover):
    """Sorted degrees over the connected components of the base, or None."""
    try:
        d = degree(cover)
    except NotPwConnected:
        return None
    if isinstance(d, int):
        return [d]
    return sorted(d[comp[0]] for comp in cover.base.poset.components())


# -- criteria -----------------------------------------------------------------


def criterion_1():
    spaces, build = corpus()
    start = time.perf_counter()
    bad = []
    for name, X in spaces.items():
        pw = pw_space(X)
        if not (is_schematic_space(pw.space) and is_qc_isomorphism(pw.projection)):
            bad.append(name)
    elapsed = time.perf_counter() - start
    ok = not bad and len(spaces) >= 20 and elapsed + build < 30
    return ok, f"({len(spaces)} spaces, {len(spaces) - len(bad)} pass; checks {elapsed:.1f}s + corpus {build:.1f}s; failing: {bad or 'none'})"


def criterion_2():
    spaces, _ = corpus()
    bad = []
    counts = {True: 0, False: 0}
    for name, X in spaces.items():
        well = is_well_connected(X)
        counts[well] += 1
        alg, _, _ = section_algebra(X, X.points)
        prof = connectivity_profile(X)
        if well != (len(wc_components(X)) == 1 and alg.dim > 0):
            bad.append(name)
        if well != (prof["top_connected"] and prof["pw_connected"]):
            bad.append(name + "(top&pw)")
    return not bad, f"({len(spaces)} spaces, {counts[True]} well-connected, {counts[False]} not; failing: {bad or 'none'})"


def qc_isomorphisms():
    spaces, _ = corpus()
    out = [(f"pw({name})", pw_space(X).projection) for name, X in spaces.items()]
    out += [("chain_collapse", chain_collapse(2)), ("chain_collapse_p3", chain_collapse(3))]
    for name, X in spaces.items():
        if not is_affine(X):
            continue
        alg, maps, _ = section_algebra(X, X.points)
        if alg.dim > 0:
            out.append((f"collapse({name})", SpaceMorphism(X, point(alg), {x: "*" for x in X.points}, maps)))
    return out


def criterion_3():
    rng = np.random.default_rng(3)
    bad = []
    isos = qc_isomorphisms()
    covers = 0
    for name, f in isos:
        X, Y = f.src, f.dst
        if not is_qc_isomorphism(f):
            bad.append(name + ":not qc-iso")
            continue
        tower = TOWERS[X.p]
        if len(schematic_points(X)) != len(schematic_points(Y)):
            bad.append(name + ":points")
        if len(geometric_points(X, tower)) != len(geometric_points(Y, tower)):
            bad.append(name + ":geometric points")
        # down -> up -> down
        for b in [structure_cover(Y), random_cover(rng, Y)]:
            up = pullback_cover(f, b)
            back = pushforward_cover(f, up)
            ref = transport_profile(Y, b)
            if transport_profile(X, up) != ref or transport_profile(Y, back) != ref:
                bad.append(name + ":pullback")
            if None not in (degree_profile(b), degree_profile(up)) and degree_profile(up) != degree_profile(b):
                bad.append(name + ":degree")
            covers += 1
        # up -> down -> up
        a = random_cover(rng, X)
        down = pushforward_cover(f, a)
        again = pullback_cover(f, down)
        ref = transport_profile(X, a)
        if transport_profile(Y, down) != ref or transport_profile(X, again) != ref:
            bad.append(name + ":pushforward")
        covers += 1
    return not bad, f"({len(isos)} qc-isomorphisms, {covers} transported covers; failing: {bad or 'none'})"


def criterion_4():
    start = time.perf_counter()
    tower = TOWERS[2]
    X0 = point(prime_field(2))
    (gp,) = geometric_points(X0, tower)
    f4, f8 = extend_scalars(X0, tower.field(2)), extend_scalars(X0, tower.field(3))
    gens = {"F4": f4, "F8": f8, "F4xF2": product_cover(f4, structure_cover(X0)).cover}
    rep = galois_axioms_report(X0, gens, gp, tower, max_degree=8)
    notes = []
    ok = rep.ok
    for d in [1, 2, 3]:
        cover = extend_scalars(X0, tower.field(d)) if d > 1 else structure_cover(X0)
        fs = fib(cover, gp, tower)
        order = aut_group(cover).order
        good = len(fs) == d and fs.cycle_type() == [d] and order == d
        ok = ok and good
        notes.append(f"d={d}:|fib|={len(fs)},cycles={fs.cycle_type()},|Aut|={order}")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 60
    counts = rep.counts()
    axioms = sum(good == total > 0 for good, total in counts.values())
    ok = ok and len(counts) == 5 and axioms == 5
    return ok, f"({len(rep.family)} covers, {axioms}/5 axioms hold on every instance; {'; '.join(notes)}; {elapsed:.1f}s)"


@functools.lru_cache(maxsize=None)
def kernel_oracle_counts():
    counts = {}
    rng = np.random.default_rng(5)
    counts["flat"] = sum(is_flat(f) == is_flat_oracle(f) for f in (random_map(rng, int(rng.choice([2, 3])), max_src=3) for _ in range(200)))
    rng = np.random.default_rng(55)
    algebras = [random_algebra(rng, int(rng.choice([2, 3])), max_dim=4) for _ in range(200)]
    truth = [nilradical_by_enumeration(a) for a in algebras]
    counts["nil_frobenius"] = sum(nilradical(a) == t for a, t in zip(algebras, truth))
    counts["nil_trace"] = sum(nilradical_by_trace_form(a) == t for a, t in zip(algebras, truth))
    rng = np.random.default_rng(555)
    agree = 0
    for _ in range(100):
        p = int(rng.choice([2, 3]))
        a = random_algebra(rng, p, max_dim=12 if p == 2 else 7)
        e1 = [tuple(v) for v in idempotents_by_enumeration(a)]
        e2 = [tuple(v) for v in idempotents_by_splitting(a)]
        agree += e1 == e2
    counts["idempotents"] = agree
    return counts


def criterion_5():
    c = kernel_oracle_counts()
    ok = c["flat"] == 200 and c["nil_trace"] == 200 and c["nil_frobenius"] == 200 and c["idempotents"] == 100
    detail = (
        f"(flatness {c['flat']}/200; trace-form radical {c['nil_trace']}/200; "
        f"Frobenius-kernel nilradical {c['nil_frobenius']}/200; idempotents {c['idempotents']}/100)"
    )
    if not ok and c["nil_trace"] < 200 and c["flat"] == 200 and c["nil_frobenius"] == 200 and c["idempotents"] == 100:
        detail += " -- the trace form is degenerate in characteristic p (e.g. F_2[e]/e^2), so the trace-form clause cannot hold; the shipped nilradical uses the Frobenius kernel"
    return ok, detail


def criterion_6():
    spaces, _ = corpus()
    rng = np.random.default_rng(6)
    bad = []
    affine = sheaves = 0
    for name, X in spaces.items():
        if not is_affine(X):
            continue
        affine += 1
        alg, _, _ = section_algebra(X, X.points)
        gens = [X.structure_sheaf()]
        if alg.dim > 0:
            gens += [sheaf_from_module(X, random_module(rng, alg)) for _ in range(3)]
        for M in gens:
            sheaves += 1
            if any(cohomology_dims(M, X.points)[1:]):
                bad.append(name)
    circle = pseudocircle(2)
    dims = cohomology_dims(circle.structure_sheaf(), circle.points)
    ok = not bad and affine > 0 and dims == [1, 1]
    return ok, f"({affine} affine spaces, {sheaves} sheaves with H^i=0 for i>0; pseudocircle H = {dims}; failing: {bad or 'none'})"


def criterion_7():
    spaces, _ = corpus()
    rng = np.random.default_rng(7)
    bad = []
    certs = bases = hom_checks = brute_checks = 0
    for name, X in spaces.items():
        if not is_well_connected(X):
            continue
        bases += 1
        tower = TOWERS[X.p]
        f2 = extend_scalars(X, tower.field(2))
        for a in [structure_cover(X), f2, product_cover(f2, structure_cover(X)).cover, random_cover(rng, X)]:
            c = trivialize(a)
            certs += 1
            if not (c.n == degree(a) and verify_certificate(c)):
                bad.append(name + ":certificate")
        small = all(X.stalk[x].dim == 1 for x in X.points)
        for m in range(1, 4):
            for n in range(1, 4):
                src, dst = trivial_cover(X, m), trivial_cover(X, n)
                induced = {index_map_morphism(src, dst, phi) for phi in iproduct(range(m), repeat=n)}
                homs = set(hom_set(src, dst))
                hom_checks += 1
                if len(induced) != m ** n or homs != induced:
                    bad.append(f"{name}:homs {m}->{n}")
                if small and X.p ** (m * n) <= 20000:
                    brute_checks += 1
                    if set(brute_cover_homs(src, dst)) != induced:
                        bad.append(f"{name}:brute {m}->{n}")
    detail = f"({bases} well-connected bases, {certs} certificates, {hom_checks} hom sets, {brute_checks} by brute force; failing: {bad or 'none'})"
    return not bad and bases > 0, detail


def criterion_8():
    text = open(README).read() if os.path.exists(README) else ""
    ok = "## Out of scale" in text
    return ok, "(disclosure: the comparison with scheme-side fundamental groups and the examples over Q[x] are not reproduced; criteria 3 and 4 are the desk-scale surrogate, see README)"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


# -- pytest wrappers ------------------------------------------------------------


def report(capsys, n, fn):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + line(n, ok, detail))
    return ok


def test_criterion_1_pw_correctness(capsys):
    assert report(capsys, 1, criterion_1)


def test_criterion_2_connectedness(capsys):
    assert report(capsys, 2, criterion_2)


def test_criterion_3_point_invariance(capsys):
    assert report(capsys, 3, criterion_3)


def test_criterion_4_galois_suite(capsys):
    assert report(capsys, 4, criterion_4)


@pytest.mark.xfail(strict=True, reason="the trace form is degenerate in characteristic p; see the ledger entry on criterion 5")
def test_criterion_5_kernel_oracles(capsys):
    assert report(capsys, 5, criterion_5)


def test_criterion_5_production_oracles():
    # everything in criterion 5 except the trace-form clause
    c = kernel_oracle_counts()
    assert c["flat"] == 200 and c["nil_frobenius"] == 200 and c["idempotents"] == 100


def test_criterion_6_cohomology(capsys):
    assert report(capsys, 6, criterion_6)


def test_criterion_7_trivialization(capsys):
    assert report(capsys, 7, criterion_7)


def test_criterion_8_disclosure(capsys):
    assert report(capsys, 8, criterion_8)


if __name__ == "__main__":
    for i, fn in enumerate(CRITERIA, 1):
        print(line(i, *fn()), flush=True)
