"""The fiber functor at a geometric point, with the Frobenius action."""

from math import lcm

from ..finalg import embeddings, local_decomposition, tensor_over
from ..finalg.omega import cycle_type


class FiberSet:
    """Points of Spec(Omega (x)_{O_x} A_x) at a geometric point.

    ``elements[i] = (factor, embedding)``; ``characters[i]`` is the
    corresponding map A_x -> F_{p^m} and ``frobenius[i]`` the index of its
    image under the Frobenius that fixes the residue field of the point.
    """

    __slots__ = ("x", "elements", "characters", "frobenius", "tower", "_common", "_lookup")

    def __init__(self, x, elements, characters, frobenius, tower):
        self.x = x
        self.elements = elements
        self.characters = characters
        self.frobenius = frobenius
        self.tower = tower
        self._common = 1
        for c in characters:
            self._common = lcm(self._common, c.dst.dim)
        self._lookup = {self._lift(c).mat.tobytes(): i for i, c in enumerate(characters)}

    def _lift(self, chi):
        return self.tower.embedding(chi.dst.dim, self._common).compose(chi)

    def __len__(self):
        return len(self.elements)

    def index_of(self, chi):
        """Index of the element whose character agrees with chi in a common field."""
        if self._common % chi.dst.dim == 0:
            i = self._lookup.get(self._lift(chi).mat.tobytes())
            if i is not None:
                return i
        t = self.tower
        d = chi.dst.dim
        for i, c in enumerate(self.characters):
            m = lcm(d, c.dst.dim)
            if t.embedding(d, m).compose(chi) == t.embedding(c.dst.dim, m).compose(c):
                return i
        raise ValueError("character is not an element of this fiber")

    def cycle_type(self):
        return cycle_type(self.frobenius)

    def orbits(self):
        seen, out = set(), []
        for i in range(len(self.elements)):
            if i in seen:
                continue
            orb, j = [], i
            while j not in seen:
                seen.add(j)
                orb.append(j)
                j = self.frobenius[j]
            out.append(orb)
        return out


def fib(cover, gp, tower):
    """Fiber of a cover at a geometric point of its base."""
    x = gp.point.max_rep.x
    chi = gp.character
    d = chi.dst.dim
    t = tensor_over(cover.structure(x), chi)
    dec = local_decomposition(t.algebra)
    elements, chars, embs_of = [], [], []
    for i, fac in enumerate(dec.factors):
        e = fac.dim // d
        target = tower.field(d * e)
        over_k = dec.projections[i].compose(t.right)
        base = tower.embedding(d, d * e)
        embs = [m for m in embeddings(fac, target) if m.compose(over_k) == base]
        to_fac = dec.projections[i].compose(t.left)
        for j, m in enumerate(embs):
            elements.append((i, j))
            chars.append(m.compose(to_fac))
        embs_of.append(embs)
    frob = []
    for i, j in elements:
        m = embs_of[i][j]
        sigma = tower.frobenius(m.dst.dim, d)
        j2 = next(k for k, m2 in enumerate(embs_of[i]) if m2 == sigma.compose(m))
        frob.append(elements.index((i, j2)))
    return FiberSet(x, elements, chars, frob, tower)


def fib_map(f, gp, tower, fib_src=None, fib_dst=None):
    """fib(B) -> fib(A) induced by f: A -> B, as a list of indices."""
    fa = fib_src or fib(f.src, gp, tower)
    fb = fib_dst or fib(f.dst, gp, tower)
    x = fa.x
    return [fa.index_of(c.compose(f.maps[x])) for c in fb.characters]
