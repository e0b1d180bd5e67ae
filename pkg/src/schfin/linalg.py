"""Exact linear algebra over the prime field F_p.

Matrices are numpy int64 arrays with entries reduced to 0..p-1. Vectors are
rows when stacked into a basis. Primes are assumed below 2**31 so that
products of two residues fit in int64.
"""

import numpy as np


def as_mat(a, p, shape=None):
    m = np.array(a, dtype=np.int64)
    if shape is not None:
        m = m.reshape(shape)
    return m % p


def zeros(r, c):
    return np.zeros((r, c), dtype=np.int64)


def eye(n):
    return np.eye(n, dtype=np.int64)


def inv_scalar(a, p):
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse mod p")
    return pow(a, p - 2, p)


def matmul(a, b, p):
    """Product mod p; exact float BLAS when the partial sums stay below 2**52."""
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    inner = a.shape[-1] if a.ndim else 0
    if inner * (p - 1) ** 2 < 2 ** 52:
        return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % p
    return (a @ b) % p


def _rref_block(m, p):
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if len(nz) == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            m[[r, k]] = m[[k, r]]
        m[r, c:] = (m[r, c:] * inv_scalar(m[r, c], p)) % p
        col = m[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if len(nzr):
            # the pivot row vanishes left of c
            m[np.ix_(nzr, range(c, cols))] = (m[nzr, c:] - np.outer(col[nzr], m[r, c:])) % p
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rref(m, p):
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = np.array(m, dtype=np.int64) % p
    if m.ndim != 2:
        raise ValueError("rref expects a matrix")
    rows, cols = m.shape
    if rows <= 2 * cols + 8:
        return _rref_block(m, p)
    # tall input: fold row chunks into a running basis
    basis, pivots = _rref_block(m[: cols + 8].copy(), p)
    for start in range(cols + 8, rows, cols + 8):
        chunk = m[start:start + cols + 8]
        if pivots:
            chunk = (chunk - matmul(chunk[:, pivots], basis, p)) % p
        if not chunk.any():
            continue
        basis, pivots = _rref_block(np.vstack([basis, chunk]), p)
    return basis, pivots


def rank(m, p):
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def row_basis(vectors, p, n=None):
    """Canonical (rref) basis of the span of the given row vectors."""
    v = np.asarray(vectors, dtype=np.int64)
    if v.size == 0:
        width = n if n is not None else (v.shape[1] if v.ndim == 2 else 0)
        return zeros(0, width)
    return rref(v, p)[0]


def nullspace(m, p):
    """Basis (as rows) of {x : m @ x = 0}."""
    m = np.asarray(m, dtype=np.int64)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return eye(cols)
    r, piv = rref(m, p)
    free = [c for c in range(cols) if c not in piv]
    basis = zeros(len(free), cols)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(piv):
            basis[k, pc] = (-r[i, f]) % p
    return basis


def solve(m, b, p):
    """One solution x of m @ x = b, or None."""
    m = np.asarray(m, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    aug = np.hstack([m, b]) % p
    r, piv = rref(aug, p)
    n = m.shape[1]
    if n in piv:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = r[i, n]
    return x % p


def inverse(m, p):
    m = np.asarray(m, dtype=np.int64)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    if n == 0:
        return zeros(0, 0)
    r, piv = rref(np.hstack([m % p, eye(n)]), p)
    if piv[:n] != list(range(n)) or len(r) < n:
        raise ValueError("matrix is singular")
    return r[:, n:] % p


class Reducer:
    """Reduction modulo a subspace given by its canonical basis.

    ``reduce`` maps a vector to its normal form (zero at pivot columns);
    ``coords`` gives the coordinates of the class of a vector in the
    quotient, indexed by the non-pivot columns.
    """

    def __init__(self, basis, n, p):
        self.p = p
        self.n = n
        self.basis, self.pivots = (rref(basis, p) if len(basis) else (zeros(0, n), []))
        self.free = [c for c in range(n) if c not in set(self.pivots)]

    @property
    def dim(self):
        return len(self.pivots)

    def reduce(self, v):
        v = np.asarray(v, dtype=np.int64) % self.p
        if not self.pivots:
            return v
        if v.ndim == 1:
            return (v - matmul(v[self.pivots], self.basis, self.p)) % self.p
        return (v - matmul(v[:, self.pivots], self.basis, self.p)) % self.p

    def coords(self, v):
        r = self.reduce(v)
        return r[..., self.free]

    def contains(self, v):
        return not self.reduce(v).any()

    def section(self):
        """Matrix (n x codim) whose columns are representatives of the quotient basis."""
        s = zeros(self.n, len(self.free))
        for k, f in enumerate(self.free):
            s[f, k] = 1
        return s

    def projection(self):
        """Matrix (codim x n) of the quotient map in quotient coordinates."""
        return self.coords(eye(self.n)).T % self.p


def span_coords(basis, pivots, v, p):
    """Coordinates of v in an rref basis; assumes v lies in the span."""
    v = np.asarray(v, dtype=np.int64) % p
    return v[..., pivots] % p


def intersect(a, b, p, n):
    """Canonical basis of the intersection of two row spans in F_p^n."""
    a = np.asarray(a, dtype=np.int64).reshape(-1, n)
    b = np.asarray(b, dtype=np.int64).reshape(-1, n)
    if len(a) == 0 or len(b) == 0:
        return zeros(0, n)
    k = nullspace(np.vstack([a, -b]).T % p, p)
    if len(k) == 0:
        return zeros(0, n)
    return row_basis(k[:, : len(a)] @ a % p, p, n)


def same_span(a, b, p, n):
    ra = row_basis(np.asarray(a, dtype=np.int64).reshape(-1, n), p, n)
    rb = row_basis(np.asarray(b, dtype=np.int64).reshape(-1, n), p, n)
    return ra.shape == rb.shape and bool((ra == rb).all())


def is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True
