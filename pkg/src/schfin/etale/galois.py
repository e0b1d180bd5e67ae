"""Galois objects and an executable check of the Galois-category axioms."""

from itertools import product as iproduct

from ..errors import NotConnected, NotSchematic, SizeBound
from ..pwconn import connectivity_profile, wc_components_algebra
from ..rspace import is_schematic_space
from .cover import constant_rank, etale_cover_report, product_cover, structure_cover, tensor_cover, zero_cover
from .fibers import fib, fib_map
from .morphisms import aut_group, hom_set, image_factorization, quotient_by_group, structure_morphism


def is_connected_cover(cover):
    if cover.is_zero:
        return False
    return len(wc_components_algebra(cover.base, cover.sheaf, check=False)) == 1


def is_galois(cover, group=None):
    """Connected, and the invariants of the full automorphism group are O_X."""
    if not is_connected_cover(cover):
        return False
    group = group or aut_group(cover)
    q = quotient_by_group(cover, group.elements, check=False).cover
    return all(q.structure(x).is_iso() for x in cover.points)


def galois_group(cover):
    return aut_group(cover)


class Instance:
    __slots__ = ("label", "ok")

    def __init__(self, label, ok):
        self.label = label
        self.ok = bool(ok)

    def as_dict(self):
        return {"instance": self.label, "ok": self.ok}


AXIOMS = (
    "1: final object and fibered products",
    "2: finite coproducts and quotients",
    "3: epi-mono factorization, monos are summands",
    "4: fiber functor preserves the constructions",
    "5: fiber functor is conservative",
)


class FamilyMember:
    __slots__ = ("name", "cover", "degree", "fiber", "aut", "galois")

    def __init__(self, name, cover, degree, fiber, aut, galois):
        self.name = name
        self.cover = cover
        self.degree = degree
        self.fiber = fiber
        self.aut = aut
        self.galois = galois

    def as_dict(self):
        return {
            "name": self.name,
            "degree": self.degree,
            "fiber_size": len(self.fiber),
            "frobenius_cycles": self.fiber.cycle_type(),
            "aut_order": None if self.aut is None else self.aut.order,
            "galois": self.galois,
        }


class GaloisReport:
    __slots__ = ("axioms", "family", "skipped")

    def __init__(self, axioms, family, skipped):
        self.axioms = axioms
        self.family = family
        self.skipped = skipped

    @property
    def ok(self):
        return all(i.ok for insts in self.axioms.values() for i in insts)

    def counts(self):
        return {a: (sum(i.ok for i in insts), len(insts)) for a, insts in self.axioms.items()}

    def failures(self):
        return [(a, i.label) for a, insts in self.axioms.items() for i in insts if not i.ok]

    def as_dict(self):
        return {
            "ok": self.ok,
            "axioms": {a: [i.as_dict() for i in insts] for a, insts in self.axioms.items()},
            "family": [m.as_dict() for m in self.family],
            "skipped": list(self.skipped),
        }

    def summary(self):
        lines = [f"{'PASS' if self.ok else 'FAIL'}: {len(self.family)} covers, {sum(len(v) for v in self.axioms.values())} instances"]
        for a, (good, total) in self.counts().items():
            lines.append(f"  axiom {a}: {good}/{total}")
        lines.append("  cover | degree | fib | frobenius cycles | |Aut| | galois")
        for m in self.family:
            d = m.as_dict()
            lines.append(f"  {d['name']} | {d['degree']} | {d['fiber_size']} | {d['frobenius_cycles']} | {d['aut_order']} | {d['galois']}")
        for s in self.skipped:
            lines.append(f"  skipped: {s}")
        return "\n".join(lines)


class _Family:
    """Covers up to isomorphism, with cached hom sets and fibers."""

    def __init__(self, gp, tower, max_degree, bound):
        self.gp = gp
        self.tower = tower
        self.max_degree = max_degree
        self.bound = bound
        self.members = []
        self.homs = {}
        self.skipped = []

    def hom(self, a, b):
        key = (id(a), id(b))
        if key not in self.homs:
            try:
                self.homs[key] = hom_set(a, b, self.bound)
            except SizeBound:
                self.homs[key] = None
        return self.homs[key]

    def find(self, cover):
        sig = cover.signature()
        for m in self.members:
            if m.cover.signature() != sig:
                continue
            homs = self.hom(cover, m.cover)
            if homs and any(h.is_iso() for h in homs):
                return m
        return None

    def add(self, name, cover):
        deg = constant_rank(cover)
        if deg is None or deg > self.max_degree:
            return None
        found = self.find(cover)
        if found is not None:
            return found
        cover.name = name
        try:
            aut = aut_group(cover, self.bound)
        except SizeBound:
            aut = None
            self.skipped.append(f"automorphisms of {name}")
        galois = is_galois(cover, aut) if aut is not None else None
        m = FamilyMember(name, cover, deg, fib(cover, self.gp, self.tower), aut, galois)
        self.members.append(m)
        return m


def _subgroups(aut):
    """The trivial group, the cyclic subgroups and the full group, as index lists.

    H0 is always the trivial group.
    """
    seen, out = set(), []
    for idx in [[]] + [[i] for i in range(aut.order)] + [list(range(aut.order))]:
        sub = tuple(aut.generated(idx))
        if sub not in seen:
            seen.add(sub)
            out.append(sub)
    return out


def galois_axioms_report(space, generators, gp, tower, max_degree=8, rounds=1, bound=20000):
    """Close a family of covers and check the five axioms on every instance.

    ``generators`` maps names to covers. The family starts from 0, O and
    the generators, and ``rounds`` times adds products, tensor products,
    quotients by subgroups of automorphisms and image factorizations, keeping
    degrees at most ``max_degree``.
    """
    if not connectivity_profile(space)["connected"]:
        raise NotConnected("space not connected")
    if not is_schematic_space(space):
        raise NotSchematic("space is not schematic")
    fam = _Family(gp, tower, max_degree, bound)
    zero, one = zero_cover(space), structure_cover(space)
    fam.add("0", zero)
    fam.add("O", one)
    seeds = [fam.add(name, c) for name, c in generators.items()]
    seeds = [s for s in seeds if s is not None]
    ax = {a: [] for a in AXIOMS}
    for _ in range(rounds):
        current = list(fam.members)
        for i, a in enumerate(current):
            for b in current[i:]:
                if a.degree + b.degree <= max_degree:
                    fam.add(f"({a.name} x {b.name})", product_cover(a.cover, b.cover).cover)
                if a.degree * b.degree <= max_degree:
                    fam.add(f"({a.name} (x) {b.name})", tensor_cover(structure_morphism(a.cover), structure_morphism(b.cover)).cover)
        for a in list(fam.members):
            if a.aut is None:
                continue
            for k, sub in enumerate(_subgroups(a.aut)[1:], 1):
                q = quotient_by_group(a.cover, [a.aut.elements[j] for j in sub], check=False).cover
                fam.add(f"{a.name}/H{k}", q)
        for a in current:
            for b in current:
                for k, f in enumerate(fam.hom(a.cover, b.cover) or []):
                    fac = image_factorization(f)
                    fam.add(f"im({a.name} -> {b.name} #{k})", fac.image)
                    fam.add(f"coim({a.name} -> {b.name} #{k})", fac.complement)
    members = list(fam.members)
    one_m = next(m for m in members if m.name == "O")
    zero_m = next(m for m in members if m.name == "0")

    # axiom 1
    for m in members:
        homs = fam.hom(one_m.cover, m.cover)
        ax[AXIOMS[0]].append(Instance(f"Hom(O, {m.name}) has one element", homs is not None and len(homs) == 1))
    bases = [one_m] + seeds
    for c in bases:
        for ia, a in enumerate(seeds):
            for b in seeds[ia:]:
                ua, vb = fam.hom(c.cover, a.cover), fam.hom(c.cover, b.cover)
                if not ua or not vb or a.degree * b.degree > max_degree * max(c.degree, 1):
                    continue
                u, v = ua[0], vb[0]
                t = tensor_cover(u, v)
                label = f"{a.name} (x)_{c.name} {b.name}"
                rep = etale_cover_report(space, t.cover.sheaf)
                ax[AXIOMS[0]].append(Instance(f"{label} is a cover", rep.ok))
                for d in members:
                    ht = fam.hom(t.cover, d.cover)
                    ha, hb = fam.hom(a.cover, d.cover), fam.hom(b.cover, d.cover)
                    if ht is None or ha is None or hb is None:
                        fam.skipped.append(f"universal property of {label} against {d.name}")
                        continue
                    pairs = sum(1 for al, be in iproduct(ha, hb) if al.compose(u) == be.compose(v))
                    ax[AXIOMS[0]].append(Instance(f"Hom({label}, {d.name}) = compatible pairs", len(ht) == pairs))
                _fibered_fiber(ax, fam, label, t, u, v)

    # axiom 2
    for m in members:
        homs = fam.hom(m.cover, zero_m.cover)
        ax[AXIOMS[1]].append(Instance(f"Hom({m.name}, 0) has one element", homs is not None and len(homs) == 1))
    for ia, a in enumerate(seeds):
        for b in seeds[ia:]:
            pc = product_cover(a.cover, b.cover)
            label = f"{a.name} x {b.name}"
            ax[AXIOMS[1]].append(Instance(f"{label} is a cover", etale_cover_report(space, pc.cover.sheaf).ok))
            for d in members:
                hp, ha, hb = fam.hom(d.cover, pc.cover), fam.hom(d.cover, a.cover), fam.hom(d.cover, b.cover)
                if hp is None or ha is None or hb is None:
                    fam.skipped.append(f"universal property of {label} against {d.name}")
                    continue
                ax[AXIOMS[1]].append(Instance(f"Hom({d.name}, {label}) = pairs", len(hp) == len(ha) * len(hb)))
            _product_fiber(ax, fam, label, pc)
    for a in members:
        if a.aut is None:
            continue
        for k, sub in enumerate(_subgroups(a.aut)):
            group = [a.aut.elements[j] for j in sub]
            q = quotient_by_group(a.cover, group, check=False)
            label = f"{a.name}/H{k}"
            ax[AXIOMS[1]].append(Instance(f"{label} is a cover", etale_cover_report(space, q.cover.sheaf).ok))
            for d in members:
                hq, hd = fam.hom(d.cover, q.cover), fam.hom(d.cover, a.cover)
                if hq is None or hd is None:
                    fam.skipped.append(f"universal property of {label} against {d.name}")
                    continue
                inv = sum(1 for u in hd if all(_fixes(g, u) for g in group))
                ax[AXIOMS[1]].append(Instance(f"Hom({d.name}, {label}) = invariant maps", len(hq) == inv))
            _quotient_fiber(ax, fam, label, a, q, group)

    # axioms 3 and 5 over every morphism of the family, and epis for axiom 4
    for a in members:
        for b in members:
            homs = fam.hom(a.cover, b.cover)
            if homs is None:
                fam.skipped.append(f"morphisms {a.name} -> {b.name}")
                continue
            for k, f in enumerate(homs):
                label = f"{a.name} -> {b.name} #{k}"
                fac = image_factorization(f)
                ok = (
                    fac.epi.is_surjective()
                    and fac.mono.is_injective()
                    and fac.mono.compose(fac.epi) == f
                    and all(m.is_iso() for m in fac.splitting.values())
                    and etale_cover_report(space, fac.image.sheaf).ok
                    and etale_cover_report(space, fac.complement.sheaf).ok
                )
                ax[AXIOMS[2]].append(Instance(f"factorization of {label}", ok))
                fm = fib_map(f, gp, tower, a.fiber, b.fiber)
                frob_ok = all(fm[b.fiber.frobenius[i]] == a.fiber.frobenius[fm[i]] for i in range(len(fm)))
                ax[AXIOMS[3]].append(Instance(f"fib({label}) commutes with Frobenius", frob_ok))
                if f.is_injective():
                    ax[AXIOMS[3]].append(Instance(f"fib({label}) onto for injective map", set(fm) == set(range(len(a.fiber)))))
                bij = len(fm) == len(a.fiber) and len(set(fm)) == len(fm)
                ax[AXIOMS[4]].append(Instance(f"fib({label}) bijective implies iso", (not bij) or f.is_iso()))
    for m in members:
        ax[AXIOMS[3]].append(Instance(f"|fib({m.name})| = degree", len(m.fiber) == m.degree))
    return GaloisReport(ax, members, fam.skipped)


def _fixes(g, u):
    p = u.dst.p
    return all(((g.maps[x].mat @ m.mat) % p == m.mat).all() for x, m in u.maps.items())


def _fibered_fiber(ax, fam, label, t, u, v):
    fa, fb = fib(u.dst, fam.gp, fam.tower), fib(v.dst, fam.gp, fam.tower)
    fc, ft = fib(u.src, fam.gp, fam.tower), fib(t.cover, fam.gp, fam.tower)
    to_a = fib_map(t.left, fam.gp, fam.tower, fa, ft)
    to_b = fib_map(t.right, fam.gp, fam.tower, fb, ft)
    ua = fib_map(u, fam.gp, fam.tower, fc, fa)
    vb = fib_map(v, fam.gp, fam.tower, fc, fb)
    expected = {(i, j) for i in range(len(fa)) for j in range(len(fb)) if ua[i] == vb[j]}
    got = [(to_a[k], to_b[k]) for k in range(len(ft))]
    ax[AXIOMS[3]].append(Instance(f"fib({label}) = fibered product of fibers", len(set(got)) == len(got) and set(got) == expected))


def _product_fiber(ax, fam, label, pc):
    ft = fib(pc.cover, fam.gp, fam.tower)
    images = []
    for pr in pc.projections:
        images += fib_map(pr, fam.gp, fam.tower, ft, fib(pr.dst, fam.gp, fam.tower))
    ok = sorted(images) == list(range(len(ft)))
    ax[AXIOMS[3]].append(Instance(f"fib({label}) = disjoint union of fibers", ok))


def _quotient_fiber(ax, fam, label, a, q, group):
    fq = fib(q.cover, fam.gp, fam.tower)
    fm = fib_map(q.inclusion, fam.gp, fam.tower, fq, a.fiber)
    actions = [fib_map(g, fam.gp, fam.tower, a.fiber, a.fiber) for g in group]
    orbits = {frozenset(act[i] for act in actions) for i in range(len(a.fiber))}
    classes = {frozenset(i for i in range(len(a.fiber)) if fm[i] == k) for k in range(len(fq))}
    ok = set(fm) == set(range(len(fq))) and orbits == classes
    ax[AXIOMS[3]].append(Instance(f"fib({label}) = orbits of fib({a.name})", ok))
