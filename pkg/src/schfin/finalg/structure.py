"""Idempotents, local decomposition, nilradical, primes and residue fields."""

from itertools import combinations

import numpy as np

from .. import linalg as la
from ..errors import NotPrime, SizeBound
from .algebra import AlgebraMap, Ideal, corner, quotient

ENUMERATION_BOUND = 2 ** 12


def _lex_key(v):
    # colexicographic: compare from the last coordinate, so that for
    # products the factor order is preserved
    return tuple(int(t) for t in reversed(v))


def idempotents_by_enumeration(a, bound=ENUMERATION_BOUND):
    if a.p ** a.dim > bound:
        raise SizeBound(f"p^dim = {a.p}^{a.dim} exceeds the enumeration bound {bound}")
    elems = a.elements()
    sq = a.squares(elems)
    hits = elems[(sq == elems).all(axis=1)]
    return sorted((h.copy() for h in hits), key=_lex_key)


def frobenius_fixed(a):
    """Basis of {x : x**p = x}; a subalgebra isomorphic to F_p^k spanned by
    the primitive idempotents."""
    if a.dim == 0:
        return la.zeros(0, 0)
    m = (a.frobenius_matrix() - la.eye(a.dim)) % a.p
    return la.nullspace(m, a.p)


def primitive_idempotents(a):
    return [e.copy() for e in a.memo("primitive_idempotents", _primitive_idempotents)]


def _primitive_idempotents(a):
    """Complete set of primitive orthogonal idempotents, sorted lexicographically.

    Works in the Frobenius-fixed subalgebra S, a product of copies of F_p:
    its factors are the joint eigenlines of multiplication by a basis of S.
    """
    if a.dim == 0:
        return []
    p = a.p
    fixed, piv = la.rref(frobenius_fixed(a), p)
    k = len(fixed)
    # mul_s[j] maps S-coordinates of v to those of b_j * v
    mul_s = a.products(fixed, fixed)[:, :, piv]
    spaces = [la.eye(k)]
    for j in range(k):
        if len(spaces) == k:
            break
        new = []
        for w in spaces:
            if len(w) == 1:
                new.append(w)
                continue
            for c in range(p):
                m = la.matmul(w, (mul_s[j] - c * la.eye(k)) % p, p)
                y = la.nullspace(m.T, p)
                if len(y):
                    new.append(la.matmul(y, w, p))
        spaces = new
    if len(spaces) != k or any(len(w) != 1 for w in spaces):
        raise SizeBound("idempotent splitting did not certify completeness")
    idems = []
    for w in spaces:
        v = w[0] @ fixed % p
        sq = a.mult(v, v)
        i = int(np.nonzero(v)[0][0])
        lam = sq[i] * la.inv_scalar(v[i], p) % p
        idems.append(v * la.inv_scalar(lam, p) % p)
    return sorted(idems, key=_lex_key)


def idempotents_by_splitting(a):
    prims = primitive_idempotents(a)
    out = []
    for r in range(len(prims) + 1):
        for sub in combinations(prims, r):
            s = np.zeros(a.dim, dtype=np.int64)
            for v in sub:
                s = (s + v) % a.p
            out.append(s)
    return sorted(out, key=_lex_key)


def idempotents(a, method="auto"):
    """All solutions of e*e = e in canonical (lexicographic) order.

    ``method`` is "enumerate", "split" or "auto" (enumeration below the
    size bound, splitting above it).
    """
    if method == "enumerate" or (method == "auto" and a.p ** a.dim <= ENUMERATION_BOUND):
        return idempotents_by_enumeration(a)
    return idempotents_by_splitting(a)


class LocalDecomposition:
    """A = prod e_i A with each factor local."""

    __slots__ = ("parent", "idempotents", "factors", "projections", "inclusions")

    def __init__(self, parent, idempotents, factors, projections, inclusions):
        self.parent = parent
        self.idempotents = idempotents
        self.factors = factors
        self.projections = projections
        self.inclusions = inclusions

    def __len__(self):
        return len(self.factors)

    def factor_of(self, v):
        """Index of the unique factor on which the idempotent-like v is nonzero
        when v is a primitive idempotent of a target; generic helper."""
        for i, e in enumerate(self.idempotents):
            if self.parent.mult(e, v).any():
                return i
        return None

    def lift(self, i, v):
        """Element of the parent that is v on factor i and 0 elsewhere."""
        return (self.inclusions[i] @ np.asarray(v, dtype=np.int64)) % self.parent.p


def local_decomposition(a):
    return a.memo("local_decomposition", _local_decomposition)


def _local_decomposition(a):
    factors, projs, incs = [], [], []
    prims = primitive_idempotents(a)
    for e in prims:
        f, pr, inc = corner(a, e)
        factors.append(f)
        projs.append(pr)
        incs.append(inc)
    return LocalDecomposition(a, prims, factors, projs, incs)


def nilradical(a):
    return a.memo("nilradical", _nilradical)


def _nilradical(a):
    """Nilpotent elements: the kernel of a power of Frobenius.

    Frobenius x -> x^p is F_p-linear, and x is nilpotent iff x^(p^k) = 0
    once p^k >= dim.
    """
    n, p = a.dim, a.p
    if n == 0:
        return Ideal(a, la.zeros(0, 0), check=False)
    fr = a.frobenius_matrix()
    k = 1
    m = fr
    while p ** k < n:
        m = (fr @ m) % p
        k += 1
    return Ideal(a, la.nullspace(m, p), check=False)


def nilradical_by_enumeration(a, bound=ENUMERATION_BOUND):
    if a.p ** a.dim > bound:
        raise SizeBound("enumeration bound exceeded")
    elems = a.elements()
    cur = elems.copy()
    steps = max(1, a.dim)
    for _ in range(steps):
        cur = np.array([a.mult(c, e) for c, e in zip(cur, elems)], dtype=np.int64).reshape(elems.shape)
    nil = elems[~cur.any(axis=1)] if a.dim else elems[:0]
    return Ideal(a, nil, check=False)


def nilradical_by_trace_form(a):
    """Radical of (x, y) -> Tr(L_xy); contains the nilradical, and equals it
    when every local factor has length prime to p (kept for comparison)."""
    n, p = a.dim, a.p
    if n == 0:
        return Ideal(a, la.zeros(0, 0), check=False)
    traces = np.array([np.trace(a.lmat(a.basis(k))) % p for k in range(n)], dtype=np.int64)
    gram = np.einsum("ijk,k->ij", a.mul, traces) % p
    return Ideal(a, la.nullspace(gram, p), check=False)


def is_reduced(a):
    return nilradical(a).dim == 0


def spec(a):
    """Primes of A, one per local factor, in the order of the factors."""
    return list(a.memo("spec", _spec))


def _spec(a):
    dec = local_decomposition(a)
    nil = nilradical(a).basis
    out = []
    for e in dec.idempotents:
        comp = (a.one - e) % a.p
        gens = [a.mult(comp, a.basis(i)) for i in range(a.dim)]
        vecs = np.vstack([np.array(gens, dtype=np.int64).reshape(-1, a.dim), nil])
        out.append(Ideal(a, vecs, check=False))
    return out


def prime_index(a, prime):
    for i, q in enumerate(spec(a)):
        if q == prime:
            return i
    raise NotPrime("ideal is not a prime of the algebra")


def minimal_polynomial(a, x):
    """Monic minimal polynomial of x, coefficients low degree first."""
    p = a.p
    powers = [a.one.copy()]
    while True:
        cur = a.mult(powers[-1], x)
        mat = np.array(powers, dtype=np.int64).T
        sol = la.solve(mat, cur, p)
        if sol is not None:
            return [int((-c) % p) for c in sol] + [1]
        powers.append(cur)


class FiniteFieldRep:
    """A field F_{p^d} with a generator and its minimal polynomial."""

    __slots__ = ("algebra", "degree", "generator", "minpoly")

    def __init__(self, algebra, degree, generator, minpoly):
        self.algebra = algebra
        self.degree = degree
        self.generator = generator
        self.minpoly = minpoly

    @property
    def p(self):
        return self.algebra.p

    def __repr__(self):
        return f"FiniteFieldRep(p={self.p}, degree={self.degree})"


def field_rep(k):
    """Certify that k is a field and choose the lexicographically first generator."""
    if k.dim == 0 or not is_reduced(k) or len(primitive_idempotents(k)) != 1:
        raise NotPrime("algebra is not a field")
    d = k.dim
    if d == 1:
        return FiniteFieldRep(k, 1, k.one.copy(), minimal_polynomial(k, k.one))
    for g in _lex_elements(k):
        mp = minimal_polynomial(k, g)
        if len(mp) - 1 == d:
            return FiniteFieldRep(k, d, g, mp)
    raise NotPrime("no generator found")


def _lex_elements(k):
    from itertools import product as ip

    for t in ip(range(k.p), repeat=k.dim):
        yield np.array(t, dtype=np.int64)


def residue_field(a, prime):
    """Residue field at a prime, with the quotient map."""
    prime_index(a, prime)
    k, q = quotient(a, prime.basis)
    return field_rep(k), q


def residue_field_at(a, i):
    return residue_field(a, spec(a)[i])


def localization_index(f, i):
    """For f: R -> S and the i-th prime of S, the index of its preimage in R.

    Uses idempotents: the factor j of R with f(e_j) e'_i != 0.
    """
    dr = local_decomposition(f.src)
    ds = local_decomposition(f.dst)
    ei = ds.idempotents[i]
    for j, e in enumerate(dr.idempotents):
        if f.dst.mult(f(e), ei).any():
            return j
    raise NotPrime("no preimage factor")


def prime_from_kernel(f):
    """For a map into a field, the index of its kernel among the primes of the source."""
    ker = f.kernel()
    return prime_index(f.src, ker)


def preimage_indices(f):
    """List mapping each prime index of dst to the prime index of src."""
    dr = local_decomposition(f.src)
    ds = local_decomposition(f.dst)
    out = []
    for ei in ds.idempotents:
        for j, e in enumerate(dr.idempotents):
            if f.dst.mult(f(e), ei).any():
                out.append(j)
                break
    return out


def lift_map_to_factor(f, dec_src, j, dec_dst, i):
    """Induced map of local factors src_j -> dst_i (when dst factor i lies over j)."""
    mat = (dec_dst.projections[i].mat @ f.mat @ dec_src.inclusions[j]) % f.p
    return AlgebraMap(dec_src.factors[j], dec_dst.factors[i], mat, check=False)
