"""Standard cochain complex of a sheaf on an open set and its cohomology."""

import numpy as np

from .. import linalg as la
from ..poset import chains


class CochainComplex:
    """Terms C^0..C^L with differentials d^i: C^i -> C^{i+1}.

    ``blocks[i]`` lists (chain, offset, size) describing how C^i splits
    as a product over chains; ``top(chain)`` is the point whose fiber
    the block carries.
    """

    def __init__(self, p, dims, diffs, blocks=None):
        self.p = p
        self.dims = list(dims)
        self.diffs = [np.asarray(d, dtype=np.int64) % p for d in diffs]
        self.blocks = blocks
        self._h = {}

    @property
    def length(self):
        return len(self.dims)

    def d(self, i):
        """d^i as a matrix (dim C^{i+1} x dim C^i); zero outside the range."""
        n = self.dims[i] if 0 <= i < self.length else 0
        m = self.dims[i + 1] if 0 <= i + 1 < self.length else 0
        if 0 <= i < len(self.diffs):
            return self.diffs[i]
        return la.zeros(m, n)

    def dim(self, i):
        return self.dims[i] if 0 <= i < self.length else 0

    def is_complex(self):
        for i in range(self.length - 2):
            if ((self.d(i + 1) @ self.d(i)) % self.p).any():
                return False
        return True

    def cocycles(self, i):
        return la.nullspace(self.d(i), self.p) if self.dim(i) else la.zeros(0, 0)

    def boundaries(self, i):
        """Canonical basis of im d^{i-1} as rows."""
        prev = self.d(i - 1)
        return la.row_basis(prev.T, self.p, self.dim(i))

    def cohomology(self, i):
        if i not in self._h:
            self._h[i] = Cohomology(self, i)
        return self._h[i]


class Cohomology:
    """H^i of a complex: cocycles modulo boundaries, with chosen representatives."""

    def __init__(self, cx, i):
        self.complex = cx
        self.degree = i
        p = cx.p
        n = cx.dim(i)
        self.boundary = la.Reducer(cx.boundaries(i), n, p)
        z = cx.cocycles(i)
        # representatives: cocycles reduced modulo boundaries, in echelon form
        self.reps = la.row_basis(self.boundary.reduce(z) if len(z) else la.zeros(0, n), p, n)
        self.dim = len(self.reps)
        self._rep_red = la.Reducer(self.reps, n, p)

    def coordinates(self, cocycle):
        """Coordinates of the class of a cocycle in the basis ``reps``."""
        r = self.boundary.reduce(cocycle)
        return la.span_coords(self._rep_red.basis, self._rep_red.pivots, r, self.complex.p)

    def action(self, term_matrix):
        """Matrix on H^i of a chain map C^i -> C^i given as a full matrix."""
        p = self.complex.p
        cols = [self.coordinates((term_matrix @ v) % p) for v in self.reps]
        if not cols:
            return la.zeros(0, 0)
        return np.array(cols, dtype=np.int64).T % p


def standard_complex(poset, u, dim_of, restrict, p):
    """Standard complex of a sheaf given by fiber dimensions and restrictions.

    ``restrict(s, t)`` returns the matrix F_s -> F_t for s <= t.
    Degree i is the product of F_{t_i} over chains t_i > ... > t_0 in u.
    """
    u = poset.sort(u)
    degrees = []
    i = 0
    while True:
        cs = chains(poset, u, i)
        if not cs:
            break
        blocks, off = [], 0
        for c in cs:
            size = dim_of(c[0])
            blocks.append((c, off, size))
            off += size
        degrees.append((blocks, off))
        i += 1
    diffs = []
    for i in range(len(degrees) - 1):
        src_blocks, n = degrees[i]
        dst_blocks, m = degrees[i + 1]
        where = {c: (o, s) for c, o, s in src_blocks}
        d = la.zeros(m, n)
        for c, o, s in dst_blocks:
            # c = (t_{i+1}, ..., t_0); drop t_k (position i+1-k) with sign (-1)^k
            for k in range(i + 2):
                pos = i + 1 - k
                face = c[:pos] + c[pos + 1 :]
                fo, fs = where[face]
                sign = 1 if k % 2 == 0 else -1
                if pos == 0:
                    block = restrict(c[1], c[0])
                else:
                    block = la.eye(s)
                d[o : o + s, fo : fo + fs] += sign * np.asarray(block, dtype=np.int64).reshape(s, fs)
        diffs.append(d % p)
    return CochainComplex(p, [n for _, n in degrees], diffs, [b for b, _ in degrees])


def sheaf_complex(sheaf, u):
    """Standard complex of a ModuleSheaf over the open set u."""
    return standard_complex(sheaf.base.poset, u, lambda t: sheaf.fiber[t].dim, sheaf.r, sheaf.base.p)


def structure_complex(space, u):
    return standard_complex(space.poset, u, lambda t: space.stalk[t].dim, lambda s, t: space.r(s, t).mat, space.p)


def cohomology(sheaf, u):
    """List of H^0..H^L for a ModuleSheaf (or a RingedPoset's structure sheaf)."""
    cx = structure_complex(sheaf, u) if hasattr(sheaf, "stalk") else sheaf_complex(sheaf, u)
    return [cx.cohomology(i) for i in range(max(cx.length, 1))]


def cohomology_dims(sheaf, u):
    return [h.dim for h in cohomology(sheaf, u)]


def term_action(cx, i, act):
    """Block-diagonal endomorphism of C^i; ``act(t)`` is the matrix on F_t."""
    n = cx.dim(i)
    m = la.zeros(n, n)
    if cx.blocks is None or i >= len(cx.blocks):
        return m
    for c, o, s in cx.blocks[i]:
        m[o : o + s, o : o + s] = act(c[0])
    return m % cx.p


def induced_is_iso(src, dst, phi, i):
    """Whether the chain map phi (list of matrices) induces an iso on H^i."""
    p = src.p
    hs, ht = src.cohomology(i), dst.cohomology(i)
    if hs.dim != ht.dim:
        return False
    if hs.dim == 0:
        return True
    img = (phi[i] @ hs.reps.T) % p
    stacked = np.vstack([ht.boundary.basis, img.T]) if ht.boundary.dim else img.T
    return la.rank(stacked, p) - ht.boundary.dim == ht.dim


def chain_map(src, dst, block):
    """Chain map built termwise: ``block(chain)`` maps the src block to the dst block.

    Chains of ``dst`` must be chains of ``src``; coordinates of src chains
    missing from dst are dropped (projection onto a smaller open set).
    """
    maps = []
    for i in range(max(src.length, dst.length)):
        n, m = src.dim(i), dst.dim(i)
        mat = la.zeros(m, n)
        if i < dst.length and i < src.length:
            where = {c: (o, s) for c, o, s in src.blocks[i]}
            for c, o, s in dst.blocks[i]:
                so, ss = where[c]
                mat[o : o + s, so : so + ss] = np.asarray(block(c), dtype=np.int64).reshape(s, ss)
        maps.append(mat % src.p)
    return maps
