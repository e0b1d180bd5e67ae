"""JSON workspaces: named algebras, maps, spaces, sheaves and morphisms over one prime.

Schema (all scalars are integers in 0..p-1)::

    {"p": 2,
     "algebras": {name: {"dim": n, "one": [..], "mul": [[[..]]]}},
     "maps": {name: {"src": alg, "dst": alg, "mat": [[..]]}},
     "spaces": {name: {"points": [..], "hasse": [[lo, hi]], "stalk": {pt: alg},
                       "res": {"lo<hi": map}}},
     "module_sheaves": {name: {"space": sp, "fiber": {pt: {"dim": m, "action": [[[..]]]}},
                               "res": {"lo<hi": [[..]]}}},
     "algebra_sheaves": {name: {"space": sp, "fiber": {pt: alg}, "structure": {pt: map},
                                "res": {"lo<hi": map}}},
     "morphisms": {name: {"src": sp, "dst": sp, "assignment": {pt: pt},
                          "comorphism": {pt: map}}},
     "omega": {"max_degree": 12}}

Wherever an algebra or a map is expected, either a name or an inline object
is accepted. ``mat`` has dst.dim rows and src.dim columns.
"""

import json
import sys

import numpy as np

from . import linalg as la
from .errors import SchfinError
from .finalg import Algebra, AlgebraMap
from .poset import Poset
from .rspace import Module, ModuleSheaf, QcohAlgebra, RingedPoset, SpaceMorphism

SECTIONS = ("algebras", "maps", "spaces", "module_sheaves", "algebra_sheaves", "morphisms")
OBJECT_KINDS = ("spaces", "morphisms", "module_sheaves", "algebra_sheaves")
DEFAULT_OMEGA = 12


class InputError(Exception):
    """Malformed input; ``location`` is a dotted path into the document."""

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


def edge_key(lo, hi):
    return f"{lo}<{hi}"


class Workspace:
    """Everything parsed from one document, by kind and name."""

    def __init__(self, p, omega_degree=DEFAULT_OMEGA):
        self.p = p
        self.omega_degree = omega_degree
        self.algebras = {}
        self.maps = {}
        self.spaces = {}
        self.module_sheaves = {}
        self.algebra_sheaves = {}
        self.morphisms = {}

    def find(self, name):
        """(kind, object) for a space, morphism or sheaf name."""
        hits = [(k, getattr(self, k)[name]) for k in OBJECT_KINDS if name in getattr(self, k)]
        if not hits:
            raise InputError(f"no object named {name!r}")
        return hits[0]

    def get(self, kind, name):
        table = getattr(self, kind)
        if name not in table:
            raise InputError(f"no {kind[:-1].replace('_', ' ')} named {name!r}")
        return table[name]

    def space_of(self, kind, obj):
        if kind == "spaces":
            return obj
        if kind == "morphisms":
            return obj.src
        return obj.base


# -- reading ------------------------------------------------------------------


def _int_array(value, p, loc, ndim):
    try:
        arr = np.array(value, dtype=object)
    except Exception:  # noqa: BLE001 - ragged input
        raise InputError("not a rectangular array", loc) from None
    flat = arr.reshape(-1)
    for v in flat:
        if isinstance(v, bool) or not isinstance(v, int):
            raise InputError(f"scalar {v!r} is not an integer", loc)
        if not 0 <= v < p:
            raise InputError(f"scalar {v} is not in 0..{p - 1}", loc)
    if arr.size and arr.ndim != ndim:
        raise InputError(f"expected a {ndim}-dimensional array", loc)
    return arr.astype(np.int64)


def _require(d, key, loc, kind=dict):
    if not isinstance(d, dict):
        raise InputError("expected an object", loc)
    if key not in d:
        raise InputError(f"missing key {key!r}", loc)
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise InputError(f"{key!r} has the wrong type", f"{loc}.{key}")
    return v


class _Reader:
    def __init__(self, data):
        if not isinstance(data, dict):
            raise InputError("top level must be an object")
        p = _require(data, "p", "", int)
        if isinstance(p, bool) or not la.is_prime(p):
            raise InputError(f"{p!r} is not a prime", "p")
        omega = data.get("omega", {}) or {}
        deg = omega.get("max_degree", DEFAULT_OMEGA) if isinstance(omega, dict) else None
        if isinstance(deg, bool) or not isinstance(deg, int) or deg < 1:
            raise InputError("max_degree must be a positive integer", "omega.max_degree")
        for key in data:
            if key not in SECTIONS + ("p", "omega", "certificate"):
                raise InputError(f"unknown key {key!r}")
        for key in SECTIONS:
            if not isinstance(data.get(key, {}), dict):
                raise InputError("expected an object", key)
        self.data = data
        self.ws = Workspace(p, deg)

    def wrap(self, loc, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InputError:
            raise
        except SchfinError as e:
            raise InputError(f"{type(e).__name__}: {e}", loc) from None
        except (ValueError, TypeError, IndexError) as e:
            raise InputError(str(e), loc) from None

    def algebra(self, value, loc):
        if isinstance(value, str):
            if value not in self.ws.algebras:
                if value not in self.data.get("algebras", {}):
                    raise InputError(f"unknown algebra {value!r}", loc)
                self.ws.algebras[value] = self.inline_algebra(self.data["algebras"][value], f"algebras.{value}")
            return self.ws.algebras[value]
        return self.inline_algebra(value, loc)

    def inline_algebra(self, d, loc):
        dim = _require(d, "dim", loc, int)
        if isinstance(dim, bool) or dim < 0:
            raise InputError("dim must be a non-negative integer", f"{loc}.dim")
        p = self.ws.p
        one = _int_array(_require(d, "one", loc, list), p, f"{loc}.one", 1)
        mul = _int_array(_require(d, "mul", loc, list), p, f"{loc}.mul", 3)
        if one.size != dim or mul.size != dim ** 3:
            raise InputError(f"sizes do not match dim {dim}", loc)
        return self.wrap(loc, Algebra, p, mul.reshape(dim, dim, dim), one.reshape(dim))

    def map(self, value, loc, src=None, dst=None):
        if isinstance(value, str):
            if value not in self.ws.maps:
                if value not in self.data.get("maps", {}):
                    raise InputError(f"unknown map {value!r}", loc)
                self.ws.maps[value] = self.inline_map(self.data["maps"][value], f"maps.{value}")
            m = self.ws.maps[value]
        else:
            m = self.inline_map(value, loc, src, dst)
        if src is not None and m.src != src:
            raise InputError("map source does not match", loc)
        if dst is not None and m.dst != dst:
            raise InputError("map target does not match", loc)
        return m

    def inline_map(self, d, loc, src=None, dst=None):
        if not isinstance(d, dict):
            raise InputError("expected a map object or name", loc)
        a = self.algebra(d["src"], f"{loc}.src") if "src" in d else src
        b = self.algebra(d["dst"], f"{loc}.dst") if "dst" in d else dst
        if a is None or b is None:
            raise InputError("map needs src and dst", loc)
        mat = _int_array(_require(d, "mat", loc, list), self.ws.p, f"{loc}.mat", 2)
        if mat.size != a.dim * b.dim:
            raise InputError(f"mat must be {b.dim} x {a.dim}", f"{loc}.mat")
        return self.wrap(loc, AlgebraMap, a, b, mat.reshape(b.dim, a.dim))

    def edges(self, d, loc, poset):
        res = _require(d, "res", loc)
        want = {edge_key(lo, hi): (lo, hi) for lo, hi in poset.hasse}
        for k in res:
            if k not in want:
                raise InputError(f"{k!r} is not a Hasse edge", f"{loc}.res")
        for k in want:
            if k not in res:
                raise InputError(f"missing restriction {k!r}", f"{loc}.res")
        return {want[k]: (v, f"{loc}.res.{k}") for k, v in res.items()}

    def points_of(self, d, loc, pts):
        if set(d) != set(pts):
            extra = sorted(set(d) - set(pts))
            missing = sorted(set(pts) - set(d))
            what = f"unknown point {extra[0]!r}" if extra else f"missing point {missing[0]!r}"
            raise InputError(what, loc)

    def space(self, name, d):
        loc = f"spaces.{name}"
        pts = _require(d, "points", loc, list)
        for x in pts:
            if not isinstance(x, str) or "<" in x:
                raise InputError(f"point id {x!r} must be a string without '<'", f"{loc}.points")
        if len(set(pts)) != len(pts):
            raise InputError("repeated point", f"{loc}.points")
        hasse = _require(d, "hasse", loc, list)
        edges = []
        for e in hasse:
            if not (isinstance(e, list) and len(e) == 2 and all(v in pts for v in e)):
                raise InputError(f"bad Hasse edge {e!r}", f"{loc}.hasse")
            edges.append(tuple(e))
        poset = self.wrap(f"{loc}.hasse", Poset, pts, edges)
        stalks = _require(d, "stalk", loc)
        self.points_of(stalks, f"{loc}.stalk", pts)
        stalk = {x: self.algebra(stalks[x], f"{loc}.stalk.{x}") for x in pts}
        res = {e: self.map(v, el, stalk[e[0]], stalk[e[1]]) for e, (v, el) in self.edges(d, loc, poset).items()}
        return self.wrap(loc, RingedPoset, poset, stalk, res)

    def base(self, d, loc):
        ref = _require(d, "space", loc, str)
        if ref not in self.ws.spaces:
            raise InputError(f"unknown space {ref!r}", f"{loc}.space")
        return self.ws.spaces[ref]

    def module_sheaf(self, name, d):
        loc = f"module_sheaves.{name}"
        X = self.base(d, loc)
        fibers = _require(d, "fiber", loc)
        self.points_of(fibers, f"{loc}.fiber", X.points)
        fiber = {}
        for x in X.points:
            fl = f"{loc}.fiber.{x}"
            m = _require(fibers[x], "dim", fl, int)
            act = _int_array(_require(fibers[x], "action", fl, list), X.p, f"{fl}.action", 3)
            r = X.stalk[x].dim
            if act.size != r * m * m:
                raise InputError(f"action must have shape ({r}, {m}, {m})", fl)
            fiber[x] = self.wrap(fl, Module, X.stalk[x], act.reshape(r, m, m), dim=m)
        res = {}
        for e, (v, el) in self.edges(d, loc, X.poset).items():
            mat = _int_array(v, X.p, el, 2)
            rows, cols = fiber[e[1]].dim, fiber[e[0]].dim
            if mat.size != rows * cols:
                raise InputError(f"restriction must be {rows} x {cols}", el)
            res[e] = mat.reshape(rows, cols)
        return self.wrap(loc, ModuleSheaf, X, fiber, res)

    def algebra_sheaf(self, name, d):
        loc = f"algebra_sheaves.{name}"
        X = self.base(d, loc)
        fibers = _require(d, "fiber", loc)
        self.points_of(fibers, f"{loc}.fiber", X.points)
        fiber = {x: self.algebra(fibers[x], f"{loc}.fiber.{x}") for x in X.points}
        structs = _require(d, "structure", loc)
        self.points_of(structs, f"{loc}.structure", X.points)
        structure = {x: self.map(structs[x], f"{loc}.structure.{x}", X.stalk[x], fiber[x]) for x in X.points}
        res = {e: self.map(v, el, fiber[e[0]], fiber[e[1]]) for e, (v, el) in self.edges(d, loc, X.poset).items()}
        return self.wrap(loc, QcohAlgebra, X, fiber, structure, res)

    def morphism(self, name, d):
        loc = f"morphisms.{name}"
        srcs, dsts = _require(d, "src", loc, str), _require(d, "dst", loc, str)
        for ref, key in ((srcs, "src"), (dsts, "dst")):
            if ref not in self.ws.spaces:
                raise InputError(f"unknown space {ref!r}", f"{loc}.{key}")
        X, Y = self.ws.spaces[srcs], self.ws.spaces[dsts]
        assign = _require(d, "assignment", loc)
        self.points_of(assign, f"{loc}.assignment", X.points)
        for x, y in assign.items():
            if y not in Y.points:
                raise InputError(f"unknown point {y!r}", f"{loc}.assignment.{x}")
        comor = _require(d, "comorphism", loc)
        self.points_of(comor, f"{loc}.comorphism", X.points)
        co = {x: self.map(comor[x], f"{loc}.comorphism.{x}", Y.stalk[assign[x]], X.stalk[x]) for x in X.points}
        return self.wrap(loc, SpaceMorphism, X, Y, dict(assign), co)

    def read(self):
        data, ws = self.data, self.ws
        for name in data.get("algebras", {}):
            self.algebra(name, f"algebras.{name}")
        for name in data.get("maps", {}):
            self.map(name, f"maps.{name}")
        seen = {}
        for kind in OBJECT_KINDS:
            for name in data.get(kind, {}):
                if name in seen:
                    raise InputError(f"name {name!r} is used by {seen[name]} and {kind}", f"{kind}.{name}")
                seen[name] = kind
        for name, d in data.get("spaces", {}).items():
            ws.spaces[name] = self.space(name, d)
        for name, d in data.get("module_sheaves", {}).items():
            ws.module_sheaves[name] = self.module_sheaf(name, d)
        for name, d in data.get("algebra_sheaves", {}).items():
            ws.algebra_sheaves[name] = self.algebra_sheaf(name, d)
        for name, d in data.get("morphisms", {}).items():
            ws.morphisms[name] = self.morphism(name, d)
        return ws


def parse_workspace(data):
    return _Reader(data).read()


def read_text(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def load(path):
    """Parse a workspace file; ``-`` reads standard input."""
    text = read_text(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e.msg}", f"line {e.lineno} column {e.colno}") from None
    return parse_workspace(data)


# -- writing ------------------------------------------------------------------


def _lists(arr):
    return np.asarray(arr, dtype=np.int64).tolist()


def algebra_dict(a):
    return {"dim": a.dim, "one": _lists(a.one), "mul": _lists(a.mul)}


class Writer:
    """Collects objects into a canonical document, naming algebras on the way.

    Algebras already named in ``known`` keep their names; new ones are
    called A0, A1, ... in order of first use.
    """

    def __init__(self, p, omega_degree=DEFAULT_OMEGA, known=None):
        self.p = p
        self.omega_degree = omega_degree
        self.doc = {k: {} for k in SECTIONS}
        self._names = {}
        self._fresh = 0
        for name in sorted(known or {}):
            self._names.setdefault(known[name].key(), name)

    def algebra(self, a):
        key = a.key()
        if key not in self._names:
            used = set(self._names.values())
            while f"A{self._fresh}" in used:
                self._fresh += 1
            self._names[key] = f"A{self._fresh}"
        name = self._names[key]
        self.doc["algebras"][name] = algebra_dict(a)
        return name

    def map(self, m):
        return {"src": self.algebra(m.src), "dst": self.algebra(m.dst), "mat": _lists(m.mat)}

    def add_algebra(self, name, a):
        self._names.setdefault(a.key(), name)
        self.doc["algebras"][name] = algebra_dict(a)

    def add_map(self, name, m):
        self.doc["maps"][name] = self.map(m)

    def space_dict(self, X):
        return {
            "points": list(X.points),
            "hasse": [[lo, hi] for lo, hi in X.poset.hasse],
            "stalk": {x: self.algebra(X.stalk[x]) for x in X.points},
            "res": {edge_key(lo, hi): self.map(X.res[(lo, hi)]) for lo, hi in X.poset.hasse},
        }

    def add_space(self, name, X):
        self.doc["spaces"][name] = self.space_dict(X)
        return name

    def _space_ref(self, X):
        for name, d in self.doc["spaces"].items():
            if d == self.space_dict(X):
                return name
        raise InputError("space of a sheaf or morphism must be added first")

    def add_module_sheaf(self, name, sheaf, space_name=None):
        X = sheaf.base
        self.doc["module_sheaves"][name] = {
            "space": space_name or self._space_ref(X),
            "fiber": {x: {"dim": sheaf.fiber[x].dim, "action": _lists(sheaf.fiber[x].action)} for x in X.points},
            "res": {edge_key(lo, hi): _lists(sheaf.res[(lo, hi)]) for lo, hi in X.poset.hasse},
        }

    def add_algebra_sheaf(self, name, alg, space_name=None):
        X = alg.base
        self.doc["algebra_sheaves"][name] = {
            "space": space_name or self._space_ref(X),
            "fiber": {x: self.algebra(alg.fiber[x]) for x in X.points},
            "structure": {x: self.map(alg.structure[x]) for x in X.points},
            "res": {edge_key(lo, hi): self.map(alg.res[(lo, hi)]) for lo, hi in X.poset.hasse},
        }

    def add_morphism(self, name, f, src_name=None, dst_name=None):
        self.doc["morphisms"][name] = {
            "src": src_name or self._space_ref(f.src),
            "dst": dst_name or self._space_ref(f.dst),
            "assignment": {x: f(x) for x in f.src.points},
            "comorphism": {x: self.map(f.comorphism[x]) for x in f.src.points},
        }

    def document(self):
        out = {"p": self.p}
        for k in SECTIONS:
            out[k] = self.doc[k]
        out["omega"] = {"max_degree": self.omega_degree}
        return out


def dump_workspace(ws):
    """Canonical document for a workspace."""
    w = Writer(ws.p, ws.omega_degree, ws.algebras)
    for name in sorted(ws.algebras):
        w.add_algebra(name, ws.algebras[name])
    for name in sorted(ws.maps):
        w.add_map(name, ws.maps[name])
    names = {}
    for name in sorted(ws.spaces):
        w.add_space(name, ws.spaces[name])
        names[id(ws.spaces[name])] = name
    for name in sorted(ws.module_sheaves):
        s = ws.module_sheaves[name]
        w.add_module_sheaf(name, s, names.get(id(s.base)))
    for name in sorted(ws.algebra_sheaves):
        s = ws.algebra_sheaves[name]
        w.add_algebra_sheaf(name, s, names.get(id(s.base)))
    for name in sorted(ws.morphisms):
        f = ws.morphisms[name]
        w.add_morphism(name, f, names.get(id(f.src)), names.get(id(f.dst)))
    return w.document()


def to_json(doc):
    """Stable text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
