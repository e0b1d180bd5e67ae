"""Small named spaces used in the documentation, the CLI data and the tests."""

import numpy as np

from .finalg import AlgebraMap, identity, poly_algebra, prime_field, product
from .poset import Poset
from .rspace import RingedPoset, SpaceMorphism


def point(algebra, name="*"):
    return RingedPoset(Poset([name], []), {name: algebra}, {})


def f2xf2(p=2):
    return product(prime_field(p), prime_field(p))


def v_space(p=2):
    """a < b1, a < b2 with stalks F_p x F_p, F_p, F_p and the two projections."""
    prod, (pr1, pr2) = f2xf2(p)
    k = prime_field(p)
    poset = Poset(["a", "b1", "b2"], [("a", "b1"), ("a", "b2")])
    return RingedPoset(poset, {"a": prod, "b1": k, "b2": k}, {("a", "b1"): pr1, ("a", "b2"): pr2})


def chain_space(p=2):
    """a < b with O_a = F_p x F_p and the first projection."""
    prod, (pr1, _) = f2xf2(p)
    poset = Poset(["a", "b"], [("a", "b")])
    return RingedPoset(poset, {"a": prod, "b": prime_field(p)}, {("a", "b"): pr1})


def diagonal_chain(p=2):
    """a < b with F_p -> F_p x F_p the diagonal (finite, not schematic)."""
    prod, _ = f2xf2(p)
    k = prime_field(p)
    poset = Poset(["a", "b"], [("a", "b")])
    return RingedPoset(poset, {"a": k, "b": prod}, {("a", "b"): AlgebraMap(k, prod, np.ones((2, 1), dtype=np.int64))})


def dual_chain(p=2):
    """a < b with F_p[e]/(e^2) -> F_p (not flat)."""
    dual = poly_algebra(p, [0, 0, 1])
    k = prime_field(p)
    poset = Poset(["a", "b"], [("a", "b")])
    return RingedPoset(poset, {"a": dual, "b": k}, {("a", "b"): AlgebraMap(dual, k, [[1, 0]])})


def pseudocircle(p=2):
    """x1, x2 < y1, y2 with constant F_p."""
    k = prime_field(p)
    pts = ["x1", "x2", "y1", "y2"]
    edges = [("x1", "y1"), ("x1", "y2"), ("x2", "y1"), ("x2", "y2")]
    return RingedPoset(Poset(pts, edges), {t: k for t in pts}, {e: identity(k) for e in edges})


def chain_collapse(p=2):
    """chain_space -> (point, F_p x F_p), identity at a and pr1 at b."""
    ch = chain_space(p)
    prod = ch.stalk["a"]
    target = point(prod)
    return SpaceMorphism(ch, target, {"a": "*", "b": "*"}, {"a": identity(prod), "b": ch.res[("a", "b")]})


SPACES = {
    "X0": lambda: point(prime_field(2)),
    "Xv": v_space,
    "chain": chain_space,
    "diagonal_chain": diagonal_chain,
    "dual_chain": dual_chain,
    "pseudocircle": pseudocircle,
}
