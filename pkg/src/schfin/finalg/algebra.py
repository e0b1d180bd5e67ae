"""Finite-dimensional commutative F_p-algebras, their maps and ideals."""

from itertools import product as iproduct

import numpy as np

from .. import linalg as la
from ..errors import (
    BadShape,
    BadUnit,
    NotAssociative,
    NotCommutative,
    NotMultiplicative,
    NotUnital,
)


class Algebra:
    """Commutative unital algebra given by structure constants.

    ``mul[i, j]`` holds the coordinates of e_i * e_j and ``one`` the
    coordinates of the unit. ``dim == 0`` is the zero ring.
    """

    __slots__ = ("p", "dim", "mul", "one", "_key", "_memo")

    def __init__(self, p, mul, one, check=True):
        if not la.is_prime(p):
            raise BadShape(f"{p} is not prime")
        one = np.array(one, dtype=np.int64).reshape(-1)
        n = one.shape[0]
        mul = np.array(mul, dtype=np.int64)
        if n == 0:
            mul = np.zeros((0, 0, 0), dtype=np.int64)
        if mul.shape != (n, n, n):
            raise BadShape(f"mul has shape {mul.shape}, expected {(n, n, n)}")
        if check and (((mul < 0) | (mul >= p)).any() or ((one < 0) | (one >= p)).any()):
            raise BadShape("scalars must lie in 0..p-1")
        self.p = p
        self.dim = n
        self.mul = mul % p
        self.one = one % p
        self.mul.setflags(write=False)
        self.one.setflags(write=False)
        self._key = None
        self._memo = {}
        if check:
            self._validate()

    def memo(self, name, fn):
        """Cache a derived value; algebras are immutable so this is safe."""
        if name not in self._memo:
            self._memo[name] = fn(self)
        return self._memo[name]

    def _validate(self):
        n, p, c = self.dim, self.p, self.mul
        if n == 0:
            return
        if not (c == c.transpose(1, 0, 2)).all():
            raise NotCommutative("e_i e_j != e_j e_i")
        # (e_i e_j) e_k versus e_i (e_j e_k)
        lhs = np.einsum("ijm,mkl->ijkl", c, c) % p
        rhs = np.einsum("jkm,iml->ijkl", c, c) % p
        if not (lhs == rhs).all():
            bad = np.argwhere(lhs != rhs)[0]
            raise NotAssociative(f"associativity fails on basis triple {tuple(int(t) for t in bad[:3])}")
        unit = np.einsum("i,ijk->jk", self.one, c) % p
        if not (unit == np.eye(n, dtype=np.int64)).all():
            raise BadUnit("declared unit does not act as the identity")

    # -- elements --------------------------------------------------------
    def basis(self, i):
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def zero(self):
        return np.zeros(self.dim, dtype=np.int64)

    def mult(self, a, b):
        n, p = self.dim, self.p
        if n == 0:
            return self.zero()
        t = la.matmul(a, self.mul.reshape(n, n * n), p)
        return la.matmul(b, t.reshape(n, n), p)

    def products(self, xs, ys):
        """All products xs[r] * ys[s], as an array indexed (r, s, coordinate)."""
        n, p = self.dim, self.p
        xs = np.asarray(xs, dtype=np.int64).reshape(-1, n)
        ys = np.asarray(ys, dtype=np.int64).reshape(-1, n)
        if n == 0:
            return la.zeros(len(xs) * len(ys), 0).reshape(len(xs), len(ys), 0)
        t = la.matmul(xs, self.mul.reshape(n, n * n), p).reshape(len(xs), n, n)
        return la.matmul(ys, t, p)

    def lmat(self, a):
        """Matrix of multiplication by a (columns are a*e_j)."""
        n, p = self.dim, self.p
        if n == 0:
            return la.zeros(0, 0)
        t = la.matmul(a, self.mul.reshape(n, n * n), p)
        return t.reshape(n, n).T.copy()

    def power(self, a, k):
        result = self.one.copy()
        base = np.asarray(a, dtype=np.int64) % self.p
        while k:
            if k & 1:
                result = self.mult(result, base)
            base = self.mult(base, base)
            k >>= 1
        return result

    def elements(self):
        """All p**dim elements as an array, in lexicographic order."""
        if self.dim == 0:
            return np.zeros((1, 0), dtype=np.int64)
        return np.array(list(iproduct(range(self.p), repeat=self.dim)), dtype=np.int64)

    def squares(self, elems):
        """Row-wise squares of a stack of elements."""
        n, p = self.dim, self.p
        if n == 0:
            return elems.copy()
        t = (elems @ self.mul.reshape(n, n * n)) % p
        t = t.reshape(-1, n, n)
        return np.einsum("ri,rik->rk", elems, t) % p

    def frobenius_matrix(self):
        """Matrix of the F_p-linear map a -> a**p."""
        cols = [self.power(self.basis(i), self.p) for i in range(self.dim)]
        return np.array(cols, dtype=np.int64).T.reshape(self.dim, self.dim)

    @property
    def is_zero(self):
        return self.dim == 0

    def key(self):
        if self._key is None:
            self._key = (self.p, self.dim, self.mul.tobytes(), self.one.tobytes())
        return self._key

    def __eq__(self, other):
        return isinstance(other, Algebra) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Algebra(p={self.p}, dim={self.dim})"


def mk_algebra(p, dim, mul, one):
    one = np.array(one, dtype=np.int64).reshape(-1)
    if one.shape[0] != dim:
        raise BadShape(f"unit has length {one.shape[0]}, expected {dim}")
    if dim == 0:
        return Algebra(p, np.zeros((0, 0, 0)), one)
    try:
        mul = np.array(mul, dtype=np.int64)
    except ValueError as exc:
        raise BadShape("ragged structure constants") from exc
    if mul.shape != (dim, dim, dim):
        raise BadShape(f"mul has shape {mul.shape}, expected {(dim, dim, dim)}")
    return Algebra(p, mul, one)


class AlgebraMap:
    """Unital ring homomorphism; ``mat`` is dst.dim x src.dim."""

    __slots__ = ("src", "dst", "mat")

    def __init__(self, src, dst, mat, check=True):
        mat = np.array(mat, dtype=np.int64)
        if mat.size == 0:
            mat = la.zeros(dst.dim, src.dim)
        if mat.shape != (dst.dim, src.dim):
            raise BadShape(f"map matrix has shape {mat.shape}, expected {(dst.dim, src.dim)}")
        if src.p != dst.p:
            raise BadShape("characteristics differ")
        if check and ((mat < 0) | (mat >= src.p)).any():
            raise BadShape("scalars must lie in 0..p-1")
        self.src = src
        self.dst = dst
        self.mat = mat % src.p
        self.mat.setflags(write=False)
        if check:
            self._validate()

    def _validate(self):
        p = self.src.p
        if not ((self.mat @ self.src.one) % p == self.dst.one).all():
            raise NotUnital("unit is not sent to unit")
        n = self.src.dim
        if n == 0 or self.dst.dim == 0:
            return
        lhs = np.einsum("ijk,lk->ijl", self.src.mul, self.mat) % p
        cols = self.mat.T
        m = self.dst.dim
        t = (cols @ self.dst.mul.reshape(m, m * m)) % p
        rhs = np.einsum("jb,iba->ija", cols, t.reshape(n, m, m)) % p
        if not (lhs == rhs).all():
            raise NotMultiplicative("map is not multiplicative")

    @property
    def p(self):
        return self.src.p

    def __call__(self, v):
        return (self.mat @ np.asarray(v, dtype=np.int64)) % self.src.p

    def compose(self, other):
        """self after other."""
        if other.dst != self.src:
            raise BadShape("maps are not composable")
        return AlgebraMap(other.src, self.dst, (self.mat @ other.mat) % self.p, check=False)

    def rank(self):
        return la.rank(self.mat, self.p)

    def is_injective(self):
        return self.rank() == self.src.dim

    def is_surjective(self):
        return self.rank() == self.dst.dim

    def is_iso(self):
        return self.src.dim == self.dst.dim and self.is_injective()

    def inverse(self):
        return AlgebraMap(self.dst, self.src, la.inverse(self.mat, self.p), check=False)

    def kernel(self):
        return Ideal(self.src, la.nullspace(self.mat, self.p), check=False)

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraMap)
            and self.src == other.src
            and self.dst == other.dst
            and bool((self.mat == other.mat).all())
        )

    def __hash__(self):
        return hash((self.src.key(), self.dst.key(), self.mat.tobytes()))

    def __repr__(self):
        return f"AlgebraMap({self.src.dim} -> {self.dst.dim})"


def mk_map(src, dst, mat):
    return AlgebraMap(src, dst, mat)


def identity(a):
    return AlgebraMap(a, a, la.eye(a.dim), check=False)


class Ideal:
    """Ideal of an algebra, stored by its canonical echelon basis."""

    __slots__ = ("parent", "basis", "pivots")

    def __init__(self, parent, basis, check=True):
        b = np.asarray(basis, dtype=np.int64)
        b = b.reshape(-1, parent.dim) if b.size else la.zeros(0, parent.dim)
        if len(b):
            self.basis, self.pivots = la.rref(b, parent.p)
        else:
            self.basis, self.pivots = la.zeros(0, parent.dim), []
        self.basis.setflags(write=False)
        self.parent = parent
        if check:
            for v in self.basis:
                for i in range(parent.dim):
                    if not self.contains(parent.mult(v, parent.basis(i))):
                        raise ValueError("subspace is not an ideal")

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, v):
        red = la.Reducer(self.basis, self.parent.dim, self.parent.p)
        return red.contains(v)

    def key(self):
        return (self.parent.key(), self.basis.tobytes(), self.basis.shape)

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Ideal(dim={self.dim} in {self.parent!r})"


# -- constructions ---------------------------------------------------------

def zero_algebra(p):
    return Algebra(p, np.zeros((0, 0, 0)), np.zeros(0))


def prime_field(p):
    return Algebra(p, [[[1]]], [1])


def poly_algebra(p, coeffs):
    """F_p[x]/(f) with f monic given by coefficients low degree first
    (the leading 1 included); basis 1, x, ..., x^(n-1)."""
    f = [c % p for c in coeffs]
    if f[-1] != 1:
        raise BadShape("polynomial must be monic")
    n = len(f) - 1
    if n == 0:
        return zero_algebra(p)
    mul = np.zeros((n, n, n), dtype=np.int64)
    # reduce x^k for k < 2n-1
    powers = []
    cur = [0] * n
    cur[0] = 1
    for _ in range(2 * n - 1):
        powers.append(cur[:])
        top = cur[-1]
        cur = [0] + cur[:-1]
        for i in range(n):
            cur[i] = (cur[i] - top * f[i]) % p
    for i in range(n):
        for j in range(n):
            mul[i, j] = powers[i + j]
    one = np.zeros(n, dtype=np.int64)
    one[0] = 1
    return Algebra(p, mul, one, check=False)


def product(*algs):
    """Cartesian product with its projections."""
    if not algs:
        raise BadShape("empty product needs a characteristic; use prime_field")
    p = algs[0].p
    n = sum(a.dim for a in algs)
    mul = np.zeros((n, n, n), dtype=np.int64)
    one = np.zeros(n, dtype=np.int64)
    off = 0
    for a in algs:
        s = slice(off, off + a.dim)
        mul[s, s, s] = a.mul
        one[s] = a.one
        off += a.dim
    prod = Algebra(p, mul, one, check=False)
    projs = []
    off = 0
    for a in algs:
        m = la.zeros(a.dim, n)
        m[:, off:off + a.dim] = la.eye(a.dim)
        projs.append(AlgebraMap(prod, a, m, check=False))
        off += a.dim
    return prod, projs


def product_map(maps, target=None):
    """The map src -> prod(dst_i) with components ``maps``."""
    src = maps[0].src
    prod = target if target is not None else product(*[m.dst for m in maps])[0]
    mat = np.vstack([m.mat for m in maps]) if maps else la.zeros(0, src.dim)
    return AlgebraMap(src, prod, mat, check=False)


def quotient(a, ideal_basis):
    """Quotient by the ideal spanned by the given vectors (assumed an ideal)."""
    p, n = a.p, a.dim
    red = la.Reducer(np.asarray(ideal_basis, dtype=np.int64).reshape(-1, n), n, p)
    free = red.free
    m = len(free)
    if m == 0:
        q = zero_algebra(p)
        return q, AlgebraMap(a, q, la.zeros(0, n), check=False)
    sub = a.mul[np.ix_(free, free)].reshape(m * m, n)
    mul = red.coords(sub).reshape(m, m, m)
    one = red.coords(a.one)
    q = Algebra(p, mul, one, check=False)
    return q, AlgebraMap(a, q, red.projection(), check=False)


def ideal_generated(a, gens):
    """Canonical basis of the ideal generated by some elements."""
    vecs = [a.mult(g, a.basis(i)) for g in gens for i in range(a.dim)]
    return la.row_basis(np.array(vecs, dtype=np.int64).reshape(-1, a.dim), a.p, a.dim)


def subalgebra(a, basis):
    """Subalgebra spanned by ``basis`` (must contain 1 and be closed).

    Returns the algebra and its inclusion map.
    """
    p, n = a.p, a.dim
    b, piv = la.rref(np.asarray(basis, dtype=np.int64).reshape(-1, n), p) if len(basis) else (la.zeros(0, n), [])
    m = len(b)
    if m == 0:
        s = zero_algebra(p)
        return s, AlgebraMap(s, a, la.zeros(n, 0), check=False)
    prods = np.array([a.mult(b[i], b[j]) for i in range(m) for j in range(m)], dtype=np.int64)
    mul = prods[:, piv].reshape(m, m, m)
    one = a.one[piv]
    s = Algebra(p, mul, one, check=False)
    return s, AlgebraMap(s, a, b.T.copy(), check=False)


def corner(a, e):
    """The factor e*A for an idempotent e, with the projection a -> e*a.

    Also returns the (non-unital) inclusion matrix eA -> A.
    """
    p, n = a.p, a.dim
    img = la.row_basis((a.lmat(e)).T, p, n)
    m = len(img)
    if m == 0:
        z = zero_algebra(p)
        return z, AlgebraMap(a, z, la.zeros(0, n), check=False), la.zeros(n, 0)
    _, piv = la.rref(img, p)
    mul = a.products(img, img)[:, :, piv]
    one = np.asarray(e, dtype=np.int64)[piv]
    f = Algebra(p, mul, one, check=False)
    proj = (a.lmat(e)[piv, :]) % p
    return f, AlgebraMap(a, f, proj, check=False), img.T.copy()


class TensorProduct:
    """A (x)_R B with its structure maps and the quotient data.

    ``proj`` maps coordinates of the full tensor A (x)_{F_p} B (index
    i*dim B + j) to coordinates of the quotient, ``sect`` picks
    representatives.
    """

    __slots__ = ("algebra", "left", "right", "proj", "sect", "f", "g")

    def __init__(self, algebra, left, right, proj, sect, f, g):
        self.algebra = algebra
        self.left = left
        self.right = right
        self.proj = proj
        self.sect = sect
        self.f = f
        self.g = g

    def __iter__(self):
        return iter((self.algebra, self.left, self.right))


def tensor_relations(f, g):
    """Rows spanning the relations f(r)a (x) b - a (x) g(r)b."""
    a, b = f.dst, g.dst
    p = a.p
    rows = []
    ia, ib = la.eye(a.dim), la.eye(b.dim)
    for k in range(f.src.dim):
        la_k = a.lmat(f(f.src.basis(k)))
        lb_k = b.lmat(g(g.src.basis(k)))
        rel = (np.kron(la_k, ib) - np.kron(ia, lb_k)) % p
        rows.append(rel.T)
    if not rows:
        return la.zeros(0, a.dim * b.dim)
    return np.vstack(rows) % p


def tensor_over(f, g):
    """Tensor product A (x)_R B for ring maps f: R -> A and g: R -> B."""
    if f.src != g.src:
        raise BadShape("tensor_over needs maps with a common source")
    a, b = f.dst, g.dst
    p = a.p
    n = a.dim * b.dim
    red = la.Reducer(tensor_relations(f, g), n, p)
    free = red.free
    m = len(free)
    if m == 0:
        t = zero_algebra(p)
    else:
        fi = [k // b.dim for k in free]
        fj = [k % b.dim for k in free]
        ma = a.mul[np.ix_(fi, fi)]  # m x m x dimA
        mb = b.mul[np.ix_(fj, fj)]  # m x m x dimB
        full = np.einsum("xyk,xyl->xykl", ma, mb).reshape(m * m, n) % p
        mul = red.coords(full).reshape(m, m, m)
        one = red.coords(np.kron(a.one, b.one))
        t = Algebra(p, mul, one, check=False)
    proj = red.projection()
    left = la.zeros(m, a.dim)
    for i in range(a.dim):
        left[:, i] = red.coords(np.kron(a.basis(i), b.one))
    right = la.zeros(m, b.dim)
    for j in range(b.dim):
        right[:, j] = red.coords(np.kron(a.one, b.basis(j)))
    return TensorProduct(
        t,
        AlgebraMap(a, t, left, check=False),
        AlgebraMap(b, t, right, check=False),
        proj,
        red.section(),
        f,
        g,
    )


def tensor_map(t1, t2, alpha, beta):
    """Map A1 (x) B1 -> A2 (x) B2 induced by alpha: A1 -> A2, beta: B1 -> B2."""
    p = alpha.p
    m = (t2.proj @ (np.kron(alpha.mat, beta.mat) % p) @ t1.sect) % p
    return AlgebraMap(t1.algebra, t2.algebra, m, check=False)


def multiplication_map(t):
    """A (x)_R A -> A, a (x) b -> a b, for a self tensor product."""
    a = t.left.src
    p = a.p
    cols = []
    n = a.dim
    for k in range(t.sect.shape[1]):
        idx = int(np.nonzero(t.sect[:, k])[0][0])
        i, j = divmod(idx, n)
        cols.append(a.mult(a.basis(i), a.basis(j)))
    mat = np.array(cols, dtype=np.int64).T.reshape(n, len(cols)) % p
    return AlgebraMap(t.algebra, a, mat, check=False)


def tensor_product_map(t, alpha, beta):
    """A (x)_R B -> C for maps alpha: A -> C, beta: B -> C agreeing on R."""
    c = alpha.dst
    a, b = t.left.src, t.right.src
    cols = []
    for k in range(t.sect.shape[1]):
        idx = int(np.nonzero(t.sect[:, k])[0][0])
        i, j = divmod(idx, b.dim)
        cols.append(c.mult(alpha(a.basis(i)), beta(b.basis(j))))
    mat = np.array(cols, dtype=np.int64).T.reshape(c.dim, len(cols)) % c.p
    return AlgebraMap(t.algebra, c, mat, check=False)


def change_basis(a, pmat):
    """Isomorphic copy of a in the basis given by the columns of pmat.

    Returns the new algebra and the isomorphism a -> new.
    """
    p = a.p
    pm = np.asarray(pmat, dtype=np.int64) % p
    pinv = la.inverse(pm, p)
    old = np.einsum("ki,lj,klm->ijm", pm, pm, a.mul) % p
    mul = np.einsum("ijm,rm->ijr", old, pinv) % p
    b = Algebra(p, mul, (pinv @ a.one) % p, check=False)
    return b, AlgebraMap(a, b, pinv, check=False)
