"""A truncated algebraic closure of F_p: compatible finite fields F_{p^d}.

Each F_{p^d} is F_p[x]/(C_d) for a Conway-style polynomial C_d: the first
primitive polynomial, in the standard signed lexicographic order, whose
root maps to a root of C_m under x -> x^((p^d-1)/(p^m-1)) for all m | d.
These norm-compatible roots make the embeddings F_{p^m} -> F_{p^d}
compatible. Polynomials for small p are shipped in a table.
"""

from itertools import product as iproduct

import numpy as np

from .. import linalg as la
from ..errors import TowerTooSmall
from ._conway_table import CONWAY
from .algebra import AlgebraMap, poly_algebra, prime_field, tensor_over
from .structure import local_decomposition

# -- polynomial arithmetic over F_p (coefficient lists, low degree first) --


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mulmod(a, b, f, p):
    n = len(f) - 1
    res = [0] * (len(a) + len(b) - 1 if a and b else 0)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                res[i + j] = (res[i + j] + x * y) % p
    for k in range(len(res) - 1, n - 1, -1):
        c = res[k]
        if c:
            for i in range(n + 1):
                res[k - n + i] = (res[k - n + i] - c * f[i]) % p
    return _trim(res[:n])


def poly_powmod(a, e, f, p):
    result = [1]
    base = a[:]
    while e:
        if e & 1:
            result = poly_mulmod(result, base, f, p)
        base = poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def poly_eval_mod(g, x, f, p):
    """g(x) mod f by Horner."""
    acc = []
    for c in reversed(g):
        acc = poly_mulmod(acc, x, f, p) if acc else []
        if c:
            acc = acc + [0] * max(0, 1 - len(acc))
            acc[0] = (acc[0] + c) % p
            acc = _trim(acc)
    return acc


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_primitive(f, p):
    n = len(f) - 1
    if f[0] == 0:
        return False
    order = p ** n - 1
    x = [0, 1]
    if poly_powmod(x, order, f, p) != [1]:
        return False
    return all(poly_powmod(x, order // q, f, p) != [1] for q in _prime_factors(order))


def conway_polynomial(p, n, known):
    """Search for C_n given the compatible polynomials ``known[m]`` for m | n."""
    divisors = [m for m in range(1, n) if n % m == 0]
    for alphas in iproduct(range(p), repeat=n):
        # f = x^n + sum (-1)^(n-i) alpha_i x^i, alphas listed from i = n-1 down
        f = [0] * (n + 1)
        f[n] = 1
        for k, a in enumerate(alphas):
            i = n - 1 - k
            f[i] = (a if (n - i) % 2 == 0 else -a) % p
        if not is_primitive(f, p):
            continue
        ok = True
        for m in divisors:
            e = (p ** n - 1) // (p ** m - 1)
            y = poly_powmod([0, 1], e, f, p)
            if poly_eval_mod(known[m], y, f, p):
                ok = False
                break
        if ok:
            return f
    raise RuntimeError(f"no compatible polynomial found for p={p}, n={n}")


def tower_polynomials(p, max_degree):
    table = dict(CONWAY.get(p, {}))
    out = {}
    for n in range(1, max_degree + 1):
        if n in table:
            out[n] = list(table[n])
        else:
            out[n] = conway_polynomial(p, n, out)
    return out


class OmegaTower:
    """Fields F_{p^d}, d <= max_degree, with compatible embeddings."""

    def __init__(self, p, max_degree=12):
        self.p = p
        self.max_degree = max_degree
        self.polys = tower_polynomials(p, max_degree)
        self._fields = {}
        self._embeds = {}

    def field(self, d):
        if d > self.max_degree or d < 1:
            raise TowerTooSmall(f"degree {d} exceeds the tower bound {self.max_degree}")
        if d not in self._fields:
            self._fields[d] = poly_algebra(self.p, self.polys[d])
        return self._fields[d]

    def embedding(self, d, e):
        """The canonical map F_{p^d} -> F_{p^e} for d | e."""
        if e % d:
            raise ValueError(f"{d} does not divide {e}")
        key = (d, e)
        if key not in self._embeds:
            p = self.p
            src, dst = self.field(d), self.field(e)
            f = self.polys[e]
            y = poly_powmod([0, 1], (p ** e - 1) // (p ** d - 1), f, p)
            cols = []
            cur = [1]
            for _ in range(d):
                v = [0] * e
                for i, c in enumerate(cur):
                    v[i] = c
                cols.append(v)
                cur = poly_mulmod(cur, y, f, p)
            mat = np.array(cols, dtype=np.int64).T
            self._embeds[key] = AlgebraMap(src, dst, mat)
        return self._embeds[key]

    def frobenius(self, d, power=1):
        """x -> x^(p^power) on F_{p^d} as an algebra map."""
        k = self.field(d)
        mat = k.frobenius_matrix()
        m = la.eye(d)
        for _ in range(power % d if d else 0):
            m = (mat @ m) % self.p
        return AlgebraMap(k, k, m, check=False)


def embeddings(field, target):
    """All F_p-algebra maps from a field into a field ``target``.

    Uses that maps field -> target correspond to the factors of
    field (x) target that are isomorphic to target via the right map.
    """
    p = field.p
    base = prime_field(p)
    to_f = AlgebraMap(base, field, field.one.reshape(-1, 1), check=False)
    to_t = AlgebraMap(base, target, target.one.reshape(-1, 1), check=False)
    t = tensor_over(to_f, to_t)
    dec = local_decomposition(t.algebra)
    out = []
    for i, fac in enumerate(dec.factors):
        r = dec.projections[i].compose(t.right)
        if fac.dim != target.dim or not r.is_iso():
            continue
        phi = r.inverse().compose(dec.projections[i].compose(t.left))
        out.append(AlgebraMap(field, target, phi.mat, check=False))
    return sorted(out, key=lambda m: tuple(m.mat.T.reshape(-1).tolist()))


def embeddings_into_omega(f, tower):
    """Embeddings of a FiniteFieldRep into the canonical F_{p^d} of the tower.

    Returns (embeddings, frobenius) where frobenius[i] is the index of
    Frob after embedding i.
    """
    d = f.degree
    if d > tower.max_degree:
        raise TowerTooSmall(f"residue degree {d} exceeds the tower bound {tower.max_degree}")
    target = tower.field(d)
    embs = embeddings(f.algebra, target)
    fr = tower.frobenius(d)
    perm = []
    for e in embs:
        g = fr.compose(e)
        perm.append(next(i for i, h in enumerate(embs) if h == g))
    return embs, perm


def cycle_type(perm):
    seen = set()
    out = []
    for i in range(len(perm)):
        if i in seen:
            continue
        n = 0
        j = i
        while j not in seen:
            seen.add(j)
            j = perm[j]
            n += 1
        out.append(n)
    return sorted(out)
