"""Schematic points, residue fields, geometric points and fibers of morphisms."""

from math import lcm

from .errors import NotSchematic, TowerTooSmall
from .finalg import embeddings_into_omega, identity, local_decomposition, residue_field_at, spec, tensor_map
from .finalg.structure import preimage_indices, prime_from_kernel
from .pwconn import pw_space
from .rspace import SpaceMorphism, fiber_product, is_schematic_space, point_space


class PointPair:
    """A point x with the index of a prime of O_x (in spec order)."""

    __slots__ = ("x", "index")

    def __init__(self, x, index):
        self.x = x
        self.index = index

    def key(self):
        return (self.x, self.index)

    def __eq__(self, other):
        return isinstance(other, PointPair) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"({self.x},p{self.index})"

    def prime(self, space):
        return spec(space.stalk[self.x])[self.index]


class SchematicPoint:
    __slots__ = ("members", "max_rep")

    def __init__(self, members, max_rep):
        self.members = members
        self.max_rep = max_rep

    def __repr__(self):
        return f"SchematicPoint(max={self.max_rep}, size={len(self.members)})"

    def __eq__(self, other):
        return isinstance(other, SchematicPoint) and self.max_rep == other.max_rep

    def __hash__(self):
        return hash(self.max_rep)


class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def point_pairs(space):
    return [PointPair(x, i) for x in space.points for i in range(len(spec(space.stalk[x])))]


def lifting_edges(space):
    """(x, p) ~ (x', q) for Hasse edges x < x' with q pulling back to p."""
    out = []
    for x, x2 in space.poset.hasse:
        for j, i in enumerate(preimage_indices(space.res[(x, x2)])):
            out.append((PointPair(x, i), PointPair(x2, j)))
    return out


def classes_from_relation(space, pairs, edges):
    """Classes of the equivalence generated by ``edges``, each with its maximal members."""
    uf = _UnionFind(pairs)
    for a, b in edges:
        uf.union(a, b)
    groups = {}
    for q in pairs:
        groups.setdefault(uf.find(q), []).append(q)
    poset = space.poset
    out = []
    for members in groups.values():
        members.sort(key=lambda q: (poset.index[q.x], q.index))
        top = [q for q in members if not any(poset.lt(q.x, r.x) for r in members)]
        out.append((members, top))
    out.sort(key=lambda c: (poset.index[c[1][0].x], c[1][0].index))
    return out


def schematic_points(space, check=True):
    """Schematic points; each class is checked to have a unique maximal representative."""
    if check and not is_schematic_space(space):
        raise NotSchematic("schematic points are defined on schematic spaces")
    out = []
    for members, top in classes_from_relation(space, point_pairs(space), lifting_edges(space)):
        if len(top) != 1:
            raise NotSchematic(f"class of {top[0]} has {len(top)} maximal representatives")
        out.append(SchematicPoint(members, top[0]))
    return out


def class_of(points, pair):
    for pt in points:
        if pair in pt.members:
            return pt
    return None


def residue_field_of_point(space, pt):
    """Residue field at the maximal representative; all members agree in degree."""
    k, _ = residue_field_at(space.stalk[pt.max_rep.x], pt.max_rep.index)
    for q in pt.members:
        other, _ = residue_field_at(space.stalk[q.x], q.index)
        if other.degree != k.degree:
            raise NotSchematic(f"residue fields of {q} and {pt.max_rep} differ")
    return k


class GeometricPoint:
    """A schematic point with an embedding of its residue field into the tower.

    ``character`` is the composite O_x -> residue field -> F_{p^d} at the
    maximal representative x.
    """

    __slots__ = ("point", "embedding", "degree", "character")

    def __init__(self, point, embedding, degree, character):
        self.point = point
        self.embedding = embedding
        self.degree = degree
        self.character = character

    def __repr__(self):
        return f"GeometricPoint({self.point.max_rep}, degree={self.degree})"

    def as_morphism(self, space, tower, degree=None):
        """(*, F_{p^N}) -> X for N a multiple of the residue degree."""
        n = degree or self.degree
        chi = tower.embedding(self.degree, n).compose(self.character)
        return SpaceMorphism(point_space(tower.field(n)), space, {"*": self.point.max_rep.x}, {"*": chi}, check=False)


def geometric_points(space, tower, points=None):
    points = points if points is not None else schematic_points(space)
    out = []
    for pt in points:
        x, i = pt.max_rep.x, pt.max_rep.index
        k, q = residue_field_at(space.stalk[x], i)
        if k.degree > tower.max_degree:
            raise TowerTooSmall(f"residue degree {k.degree} exceeds the tower bound {tower.max_degree}")
        embs, _ = embeddings_into_omega(k, tower)
        for e in embs:
            out.append(GeometricPoint(pt, e, k.degree, e.compose(q)))
    return out


def is_geometric_point(candidate):
    """A map (*, K) -> X is geometric when its kernel does not lift to any x' > x."""
    X = candidate.dst
    x = candidate("*" if "*" in candidate.src.points else candidate.src.points[0])
    i = prime_from_kernel(candidate.comorphism[candidate.src.points[0]])
    for x2 in X.poset.up(x):
        if x2 != x and i in preimage_indices(X.r(x, x2)):
            return False
    return True


def image_pair(f, pair):
    """(f(x), preimage of the prime under the comorphism)."""
    return PointPair(f(pair.x), preimage_indices(f.comorphism[pair.x])[pair.index])


def schematic_fiber(f, pt, src_points=None, dst_points=None):
    """Schematic points of X whose image is pt; every member is checked to agree."""
    src_points = src_points if src_points is not None else schematic_points(f.src)
    dst_points = dst_points if dst_points is not None else schematic_points(f.dst)
    out = []
    for q in src_points:
        images = {class_of(dst_points, image_pair(f, m)) for m in q.members}
        if len(images) != 1:
            raise NotSchematic(f"image of {q} depends on the representative")
        if images.pop() == pt:
            out.append(q)
    return out


class FiberSpace:
    """pw((*, F_{p^N}) x_Y X) with the action of the Frobenius fixing the residue field."""

    __slots__ = ("space", "frobenius", "degree", "projection", "pw")

    def __init__(self, space, frobenius, degree, projection, pw):
        self.space = space
        self.frobenius = frobenius
        self.degree = degree
        self.projection = projection
        self.pw = pw

    @property
    def points(self):
        return self.space.points

    def orbits(self):
        return _orbits(self.points, self.frobenius)

    def spec_points(self):
        """Schematic points of the fiber with the induced Frobenius permutation."""
        pts = schematic_points(self.space, check=False)
        perm = {pt: class_of(pts, PointPair(self.frobenius[pt.max_rep.x], 0)) for pt in pts}
        return pts, perm

    def spec_orbits(self):
        """Frobenius orbits on schematic points; one per schematic point of the fiber over Y."""
        pts, perm = self.spec_points()
        return _orbits(pts, perm)


def _orbits(items, perm):
    seen, out = set(), []
    for q in items:
        if q in seen:
            continue
        orb, cur = [], q
        while cur not in seen:
            seen.add(cur)
            orb.append(cur)
            cur = perm[cur]
        out.append(orb)
    return out


def _fiber_at(f, gp, tower, n):
    g = gp.as_morphism(f.dst, tower, n)
    fp = fiber_product(g, f, check=False)
    return g, fp


def splitting_degree(f, gp, tower):
    """Smallest multiple of the residue degree splitting every stalk of the fiber."""
    n = gp.degree
    while True:
        _, fp = _fiber_at(f, gp, tower, n)
        need = n
        for q in fp.space.points:
            for fac in local_decomposition(fp.space.stalk[q]).factors:
                need = lcm(need, _residue_degree(fac))
        if need == n:
            return n
        if need > tower.max_degree:
            raise TowerTooSmall(f"fiber needs degree {need} beyond the tower bound {tower.max_degree}")
        n = need


def _residue_degree(local):
    k, _ = residue_field_at(local, 0)
    return k.degree


def geometric_fiber(f, gp, tower):
    """Geometric fiber over gp, computed over F_{p^N} with N the splitting degree."""
    n = splitting_degree(f, gp, tower)
    g, fp = _fiber_at(f, gp, tower, n)
    pw = pw_space(fp.space)
    sigma = tower.frobenius(n, gp.degree)
    perm = {}
    for q in fp.space.points:
        t = fp.tensors[q]
        x = fp.pairs[q][1]
        auto = tensor_map(t, t, sigma, identity(f.src.stalk[x]))
        dec = local_decomposition(fp.space.stalk[q])
        for k, e in enumerate(dec.idempotents):
            img = auto(e)
            k2 = next(j for j, e2 in enumerate(dec.idempotents) if (e2 == img).all())
            perm[f"{q}/{k}"] = f"{q}/{k2}"
    proj = fp.p2.compose(pw.projection)
    return FiberSpace(pw.space, perm, n, proj, pw)


def canonical_geometric_point(space, x, chi, points, tower):
    """Index into ``geometric_points(space, tower, points)`` of the point given by chi: O_x -> F_{p^n}.

    The character is moved to the maximal representative of its class
    through the residue isomorphism along the restriction.
    """
    pt = class_of(points, PointPair(x, prime_from_kernel(chi)))
    offset = 0
    for other in points:
        if other == pt:
            break
        offset += residue_field_of_point(space, other).degree
    top = pt.max_rep
    r = space.r(x, top.x)
    k, q = residue_field_at(space.stalk[top.x], top.index)
    embs, _ = embeddings_into_omega(k, tower)
    up = tower.embedding(k.degree, chi.dst.dim)
    for j, e in enumerate(embs):
        if up.compose(e).compose(q).compose(r) == chi:
            return offset + j
    raise NotSchematic("character does not extend to the maximal representative")


def geometric_image(f, gp, dst_points, tower):
    """Image of a geometric point of X under f, as an index into the geometric points of Y."""
    x = gp.point.max_rep.x
    return canonical_geometric_point(f.dst, f(x), gp.character.compose(f.comorphism[x]), dst_points, tower)
