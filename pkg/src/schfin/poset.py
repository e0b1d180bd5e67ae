"""Finite posets viewed as finite T0 spaces.

Opens are the up-closed sets: x <= y means y lies in the minimal open U_x.
Elements keep their input order, and derived sets are listed in that order.
"""

import numpy as np

from .errors import NotOpen, NotPoset, UnknownPoint


class Poset:
    """A finite poset given by its elements and Hasse (covering) pairs."""

    __slots__ = ("elements", "hasse", "index", "leq", "_up", "_down")

    def __init__(self, elements, hasse, check=True):
        self.elements = tuple(elements)
        self.index = {x: i for i, x in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise NotPoset("element identifiers must be unique")
        edges = []
        for lo, hi in hasse:
            if lo not in self.index or hi not in self.index:
                raise UnknownPoint(f"edge {lo}<{hi} mentions an unknown point", where=(lo, hi))
            edges.append((lo, hi))
        self.hasse = tuple(sorted(set(edges), key=lambda e: (self.index[e[0]], self.index[e[1]])))
        n = len(self.elements)
        leq = np.eye(n, dtype=bool)
        for lo, hi in self.hasse:
            leq[self.index[lo], self.index[hi]] = True
        for k in range(n):
            leq = leq | (leq[:, [k]] & leq[[k], :])
        if check:
            if (leq & leq.T & ~np.eye(n, dtype=bool)).any() or any(lo == hi for lo, hi in self.hasse):
                raise NotPoset("Hasse relation has a cycle")
            for lo, hi in self.hasse:
                i, j = self.index[lo], self.index[hi]
                between = leq[i, :] & leq[:, j]
                between[i] = between[j] = False
                if between.any():
                    raise NotPoset(f"{lo}<{hi} is not a covering pair", where=(lo, hi))
        self.leq = leq
        self.leq.setflags(write=False)
        self._up = {}
        self._down = {}

    @classmethod
    def from_relations(cls, elements, pairs):
        """Poset generated by arbitrary relations lo <= hi (transitively reduced)."""
        elements = tuple(elements)
        idx = {x: i for i, x in enumerate(elements)}
        n = len(elements)
        leq = np.eye(n, dtype=bool)
        for lo, hi in pairs:
            leq[idx[lo], idx[hi]] = True
        for k in range(n):
            leq = leq | (leq[:, [k]] & leq[[k], :])
        if (leq & leq.T & ~np.eye(n, dtype=bool)).any():
            raise NotPoset("relations have a cycle")
        strict = leq & ~np.eye(n, dtype=bool)
        hasse = []
        for i in range(n):
            for j in range(n):
                if strict[i, j] and not (strict[i, :] & strict[:, j]).any():
                    hasse.append((elements[i], elements[j]))
        return cls(elements, hasse, check=False)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.index

    def __eq__(self, other):
        return isinstance(other, Poset) and self.elements == other.elements and self.hasse == other.hasse

    def __hash__(self):
        return hash((self.elements, self.hasse))

    def __repr__(self):
        return f"Poset({len(self.elements)} points, {len(self.hasse)} edges)"

    def _i(self, x):
        try:
            return self.index[x]
        except KeyError:
            raise UnknownPoint(f"unknown point {x!r}", where=x) from None

    def le(self, x, y):
        return bool(self.leq[self._i(x), self._i(y)])

    def lt(self, x, y):
        return x != y and self.le(x, y)

    def up(self, x):
        if x not in self._up:
            i = self._i(x)
            self._up[x] = tuple(self.elements[j] for j in np.nonzero(self.leq[i, :])[0])
        return self._up[x]

    def down(self, x):
        if x not in self._down:
            i = self._i(x)
            self._down[x] = tuple(self.elements[j] for j in np.nonzero(self.leq[:, i])[0])
        return self._down[x]

    def sort(self, points):
        return tuple(sorted(set(points), key=self._i))

    def is_open(self, points):
        s = set(points)
        return all(set(self.up(x)) <= s for x in s)

    def upper_covers(self, x):
        return tuple(hi for lo, hi in self.hasse if lo == x)

    def lower_covers(self, x):
        return tuple(lo for lo, hi in self.hasse if hi == x)

    def height(self, x):
        """Length of the longest chain ending at x."""
        below = [self.height(y) for y in self.lower_covers(x)]
        return 1 + max(below) if below else 0

    def topological_order(self):
        """Elements sorted so that x < y implies x comes first (stable)."""
        return tuple(sorted(self.elements, key=lambda x: (self.height(x), self._i(x))))

    def maximal(self, points):
        s = set(points)
        return self.sort(x for x in s if not any(self.lt(x, y) for y in s))

    def minimal(self, points):
        s = set(points)
        return self.sort(x for x in s if not any(self.lt(y, x) for y in s))

    def induced(self, points):
        """Induced subposet on a subset (Hasse edges recomputed)."""
        pts = self.sort(points)
        rel = [(a, b) for a in pts for b in pts if a != b and self.le(a, b)]
        return Poset.from_relations(pts, rel)

    def components(self):
        """Connected components of the comparability graph, in element order."""
        seen = {}
        comps = []
        for x in self.elements:
            if x in seen:
                continue
            comp = []
            stack = [x]
            seen[x] = len(comps)
            while stack:
                y = stack.pop()
                comp.append(y)
                for lo, hi in self.hasse:
                    for a, b in ((lo, hi), (hi, lo)):
                        if a == y and b not in seen:
                            seen[b] = len(comps)
                            stack.append(b)
            comps.append(self.sort(comp))
        return comps


def min_open(poset, x):
    return poset.up(x)


def closure(poset, x):
    return poset.down(x)


def is_top_connected(poset):
    return len(poset) > 0 and len(poset.components()) == 1


def chains(poset, u, i):
    """Strictly decreasing chains t_i > ... > t_0 inside the open set u."""
    pts = poset.sort(u)
    if not poset.is_open(pts):
        raise NotOpen("chains are taken inside an open set")
    inside = set(pts)
    out = []

    def extend(chain):
        if len(chain) == i + 1:
            out.append(tuple(chain))
            return
        last = chain[-1]
        for y in pts:
            if y in inside and poset.lt(y, last):
                extend(chain + [y])

    for t in pts:
        extend([t])
    return out


class MonotoneMap:
    """Order-preserving map between posets."""

    __slots__ = ("src", "dst", "assignment")

    def __init__(self, src, dst, assignment, check=True):
        self.src = src
        self.dst = dst
        self.assignment = {x: assignment[x] for x in src.elements}
        if check:
            for x, y in self.assignment.items():
                if y not in dst:
                    raise UnknownPoint(f"{x!r} maps to unknown point {y!r}", where=x)
            for lo, hi in src.hasse:
                if not dst.le(self.assignment[lo], self.assignment[hi]):
                    raise NotPoset(f"map is not monotone on {lo}<{hi}", where=(lo, hi))

    def __call__(self, x):
        return self.assignment[x]

    def preimage(self, points):
        s = set(points)
        return self.src.sort(x for x in self.src.elements if self.assignment[x] in s)

    def compose(self, other):
        """self after other."""
        return MonotoneMap(other.src, self.dst, {x: self(other(x)) for x in other.src.elements}, check=False)


def pair_id(x, y):
    return f"({x},{y})"


def poset_fiber_product(f, g):
    """{(x, y) : f(x) = g(y)} with the product order, plus the two projections."""
    pts = [(x, y) for x in f.src.elements for y in g.src.elements if f(x) == g(y)]
    ids = [pair_id(x, y) for x, y in pts]
    rel = []
    for a, (x, y) in zip(ids, pts):
        for b, (x2, y2) in zip(ids, pts):
            if a != b and f.src.le(x, x2) and g.src.le(y, y2):
                rel.append((a, b))
    prod = Poset.from_relations(ids, rel)
    p1 = MonotoneMap(prod, f.src, {i: x for i, (x, _) in zip(ids, pts)}, check=False)
    p2 = MonotoneMap(prod, g.src, {i: y for i, (_, y) in zip(ids, pts)}, check=False)
    return prod, p1, p2, dict(zip(ids, pts))


def cyl_ids(f):
    """Point identifiers of the cylinder: ('X', x) and ('Y', y) rendered as strings."""
    return {x: f"X:{x}" for x in f.src.elements}, {y: f"Y:{y}" for y in f.dst.elements}


def cylinder_poset(f):
    """X disjoint Y, with y <= x whenever y <= f(x) (the order generated by y = f(x))."""
    xs, ys = cyl_ids(f)
    elements = [ys[y] for y in f.dst.elements] + [xs[x] for x in f.src.elements]
    rel = [(xs[lo], xs[hi]) for lo, hi in f.src.hasse]
    rel += [(ys[lo], ys[hi]) for lo, hi in f.dst.hasse]
    rel += [(ys[f(x)], xs[x]) for x in f.src.elements]
    return Poset.from_relations(elements, rel)
