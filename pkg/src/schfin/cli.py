"""Command-line interface: ``schfin check``, ``schfin construct`` and ``schfin galois``.

Exit codes: 0 when the property holds (or the command succeeded), 1 when it
is refuted, 2 on input errors.
"""

import argparse
import sys

from . import linalg as la
from .errors import NotConnected, SchfinError, SizeBound
from .etale import EtaleCover, etale_cover_report, galois_axioms_report, trivialize
from .finalg import OmegaTower, is_flat, is_flat_oracle
from .finalg.predicates import fiber_algebras
from .finalg.structure import nilradical_by_enumeration
from .points import geometric_points, schematic_points
from .pwconn import pw_space, wc_components
from .rspace import (
    affine_report,
    canonical_map,
    cylinder,
    fiber_product,
    is_affine_morphism,
    is_flat_immersion,
    is_qcoh_algebra,
    morphism_report,
    pushforward_map,
    relspec,
    schematic_report,
    stein_factorization,
)
from .serialize import InputError, Writer, load, to_json

PROPERTIES = ("finite", "qcoh", "schematic", "affine", "qciso", "etale-cover", "flat-immersion")
VERBS = ("pw", "components", "points", "geometric-points", "fiber-product", "stein", "relspec", "cylinder", "trivialize")


class Outcome:
    """Result of a check: ``holds`` plus a JSON-friendly witness when it fails."""

    def __init__(self, holds, witness=None, notes=None):
        self.holds = holds
        self.witness = witness or {}
        self.notes = notes or {}


def _plain(v):
    if isinstance(v, tuple):
        return [_plain(t) for t in v]
    if isinstance(v, list):
        return [_plain(t) for t in v]
    if isinstance(v, dict):
        return {str(k): _plain(t) for k, t in v.items()}
    return v


def _from_report(rep):
    if rep.ok:
        return Outcome(True)
    w = {"code": rep.code, "message": rep.message}
    if rep.details:
        w.update(_plain(rep.details))
    elif rep.where is not None:
        w["where"] = _plain(rep.where)
    return Outcome(False, w)


def _refuted(exc):
    return Outcome(False, {"code": type(exc).__name__, "message": str(exc)})


# -- checks -------------------------------------------------------------------


def _check_finite(kind, obj, oracle):
    X = obj
    bad = [e for e in X.poset.hasse if not is_flat(X.res[e])]
    notes = {}
    if oracle:
        try:
            other = [e for e in X.poset.hasse if not is_flat_oracle(X.res[e])]
            notes["oracle_agrees"] = other == bad
        except SizeBound:
            notes["oracle_agrees"] = None
    if bad:
        return Outcome(False, {"code": "NotFlat", "edge": list(bad[0])}, notes)
    return Outcome(True, notes=notes)


def _check_qcoh(kind, sheaf, oracle):
    if kind == "algebra_sheaves":
        sheaf = sheaf.as_module_sheaf()
    p = sheaf.base.p
    for x, y in sheaf.base.poset.hasse:
        n, mat = canonical_map(sheaf, x, y)
        m = sheaf.fiber[y].dim
        if n != m or la.rank(mat, p) != m:
            return Outcome(False, {"code": "NotQcoh", "edge": [x, y], "message": "M_x (x) O_y -> M_y is not an isomorphism"})
    return Outcome(True)


def _check_schematic(kind, obj, oracle):
    try:
        rep = schematic_report(obj) if kind == "spaces" else morphism_report(obj)
    except SchfinError as e:
        return _refuted(e)
    return _from_report(rep)


def _check_affine(kind, obj, oracle):
    try:
        if kind == "morphisms":
            return Outcome(is_affine_morphism(obj))
        rep = affine_report(obj)
    except SchfinError as e:
        return _refuted(e)
    w = {"cohomology": rep.cohomology, "acyclic": rep.acyclic, "faithfully_flat": rep.faithfully_flat, "criterion": rep.criterion}
    return Outcome(rep.ok, w if not rep.ok else None, {"criterion": rep.criterion})


def _check_qciso(kind, f, oracle):
    try:
        if not is_affine_morphism(f):
            return Outcome(False, {"code": "NotAffine", "message": "some preimage of a minimal open is not affine"})
    except SchfinError as e:
        return _refuted(e)
    for y in f.dst.points:
        if not pushforward_map(f, y).is_iso():
            return Outcome(False, {"code": "NotIsomorphism", "point": y, "message": "O_y -> (f_* O)_y is not an isomorphism"})
    return Outcome(True)


def _check_etale(kind, alg, oracle):
    out = _from_report(etale_cover_report(alg.base, alg))
    if oracle:
        try:
            holds = is_qcoh_algebra(alg) and all(
                is_flat_oracle(alg.structure[x]) and all(nilradical_by_enumeration(f).dim == 0 for f in fiber_algebras(alg.structure[x]))
                for x in alg.base.points
            )
            out.notes["oracle_agrees"] = holds == out.holds
        except SizeBound:
            out.notes["oracle_agrees"] = None
    return out


def _check_flat_immersion(kind, f, oracle):
    try:
        return Outcome(is_flat_immersion(f))
    except SchfinError as e:
        return _refuted(e)


CHECKS = {
    "finite": (("spaces",), _check_finite),
    "qcoh": (("module_sheaves", "algebra_sheaves"), _check_qcoh),
    "schematic": (("spaces", "morphisms"), _check_schematic),
    "affine": (("spaces", "morphisms"), _check_affine),
    "qciso": (("morphisms",), _check_qciso),
    "etale-cover": (("algebra_sheaves",), _check_etale),
    "flat-immersion": (("morphisms",), _check_flat_immersion),
}


def cmd_check(args, out):
    ws = load(args.file)
    kind, obj = ws.find(args.object)
    kinds, fn = CHECKS[args.property]
    if kind not in kinds:
        raise InputError(f"property {args.property!r} applies to {' or '.join(k.replace('_', ' ') for k in kinds)}, not {kind.replace('_', ' ')}")
    res = fn(kind, obj, args.oracle)
    if args.json:
        doc = {"object": args.object, "property": args.property, "holds": res.holds}
        if res.witness:
            doc["witness"] = res.witness
        if res.notes:
            doc["notes"] = res.notes
        out.write(to_json(doc))
    else:
        out.write(f"{args.property}({args.object}): {'holds' if res.holds else 'refuted'}\n")
        for k in sorted(res.witness):
            out.write(f"  {k}: {_fmt(res.witness[k])}\n")
        for k in sorted(res.notes):
            out.write(f"  {k}: {_fmt(res.notes[k])}\n")
    if res.notes.get("oracle_agrees") is False:
        raise InputError("the enumeration oracle disagrees with the fast route")
    return 0 if res.holds else 1


def _fmt(v):
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, str) for t in v):
        return f"{v[0]}<{v[1]}"
    return str(v)


# -- constructions -------------------------------------------------------------


def _arity(args, n, usage):
    if len(args.args) != n:
        raise InputError(f"usage: construct FILE {args.verb} {usage}")
    return args.args


def _points_doc(space, name):
    pts = schematic_points(space)
    return {
        "space": name,
        "points": [
            {"max_rep": [pt.max_rep.x, pt.max_rep.index], "members": [[m.x, m.index] for m in pt.members]}
            for pt in pts
        ],
    }


def _geometric_doc(space, name, tower):
    gps = geometric_points(space, tower)
    return {
        "space": name,
        "omega_degree": tower.max_degree,
        "geometric_points": [
            {
                "point": [gp.point.max_rep.x, gp.point.max_rep.index],
                "degree": gp.degree,
                "character": gp.character.mat.tolist(),
            }
            for gp in gps
        ],
    }


def cmd_construct(args, out):
    ws = load(args.file)
    omega = args.omega_degree or ws.omega_degree
    w = Writer(ws.p, omega, ws.algebras)
    verb = args.verb
    if verb in ("pw", "components", "points", "geometric-points"):
        (name,) = _arity(args, 1, "SPACE")
        X = ws.get("spaces", name)
        w.add_space(name, X)
        if verb == "pw":
            pw = pw_space(X)
            w.add_space(f"pw({name})", pw.space)
            w.add_morphism(f"pi({name})", pw.projection, f"pw({name})", name)
        elif verb == "components":
            for k, comp in enumerate(wc_components(X)):
                w.add_space(f"{name}.c{k}", comp.space)
                w.add_morphism(f"{name}.c{k}->{name}", comp.inclusion, f"{name}.c{k}", name)
        elif verb == "points":
            out.write(to_json(_points_doc(X, name)))
            return 0
        else:
            out.write(to_json(_geometric_doc(X, name, OmegaTower(ws.p, omega))))
            return 0
    elif verb in ("stein", "cylinder"):
        (name,) = _arity(args, 1, "MORPHISM")
        f = ws.get("morphisms", name)
        src, dst = _source_names(ws, f)
        w.add_space(src, f.src)
        w.add_space(dst, f.dst)
        if verb == "stein":
            st = stein_factorization(f)
            w.add_space(f"stein({name})", st.space)
            w.add_morphism(f"{name}'", st.f_prime, src, f"stein({name})")
            w.add_morphism(f"rho({name})", st.rho, f"stein({name})", dst)
        else:
            w.add_space(f"cyl({name})", cylinder(f))
    elif verb == "fiber-product":
        a, b = _arity(args, 2, "MORPHISM MORPHISM")
        f, g = ws.get("morphisms", a), ws.get("morphisms", b)
        fp = fiber_product(f, g)
        sf, _ = _source_names(ws, f)
        sg, _ = _source_names(ws, g)
        w.add_space(sf, f.src)
        w.add_space(sg, g.src)
        name = f"{a}x{b}"
        w.add_space(name, fp.space)
        w.add_morphism(f"{name}->1", fp.p1, name, sf)
        w.add_morphism(f"{name}->2", fp.p2, name, sg)
    elif verb in ("relspec", "trivialize"):
        sname, aname = _arity(args, 2, "SPACE ALGEBRA_SHEAF")
        X = ws.get("spaces", sname)
        alg = ws.get("algebra_sheaves", aname)
        if alg.base is not X:
            raise InputError(f"{aname!r} does not live on {sname!r}")
        w.add_space(sname, X)
        if verb == "relspec":
            top, f = relspec(X, alg)
            w.add_space(f"spec({aname})", top)
            w.add_morphism(f"spec({aname})->{sname}", f, f"spec({aname})", sname)
        else:
            cert = trivialize(EtaleCover(X, alg, name=aname))
            w.add_algebra_sheaf(aname, alg, sname)
            w.add_algebra_sheaf(f"cover({aname})", cert.covering.sheaf, sname)
            sections = [{x: w.map(s[x]) for x in X.points} for s in cert.sections]
            doc = w.document()
            doc["certificate"] = {"cover": aname, "covering": f"cover({aname})", "n": cert.n, "sections": sections}
            out.write(to_json(doc))
            return 0
    out.write(to_json(w.document()))
    return 0


def _source_names(ws, f):
    names = []
    for sp in (f.src, f.dst):
        hit = [n for n, s in ws.spaces.items() if s is sp]
        names.append(sorted(hit)[0] if hit else "?")
    return names


# -- Galois report --------------------------------------------------------------


def cmd_galois(args, out):
    ws = load(args.file)
    X = ws.get("spaces", args.space)
    omega = args.omega_degree or ws.omega_degree
    tower = OmegaTower(ws.p, omega)
    gens = {}
    for name in args.generators:
        alg = ws.get("algebra_sheaves", name)
        if alg.base is not X:
            raise InputError(f"{name!r} does not live on {args.space!r}")
        gens[name] = EtaleCover(X, alg, name=name)
    try:
        gps = geometric_points(X, tower)
    except SchfinError as e:
        raise InputError(str(e)) from None
    if args.point is not None:
        gps = [gp for gp in gps if gp.point.max_rep.x == args.point]
        if not gps:
            raise InputError(f"no geometric point over {args.point!r}")
    if not gps:
        raise InputError("space has no points")
    try:
        rep = galois_axioms_report(X, gens, gps[0], tower, max_degree=args.max_degree, rounds=args.rounds)
    except NotConnected:
        raise InputError("space not connected") from None
    if args.json:
        out.write(to_json(rep.as_dict()))
    else:
        out.write(rep.summary() + "\n")
    return 0 if rep.ok else 1


# -- entry point -----------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="schfin", description="Finite ringed posets, schematic checks and étale covers.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="workspace JSON file, or - for standard input")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--oracle", action="store_true", help="cross-check with the enumeration oracles")
        p.add_argument("--omega-degree", type=int, default=None, help="largest field degree in the tower")

    c = sub.add_parser("check", help="decide a property of a named object")
    common(c)
    c.add_argument("object")
    c.add_argument("property", choices=PROPERTIES)
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("construct", help="build a derived object and print it as JSON")
    common(k)
    k.add_argument("verb", choices=VERBS)
    k.add_argument("args", nargs="*")
    k.set_defaults(func=cmd_construct)

    g = sub.add_parser("galois", help="check the Galois category axioms on a generated family")
    common(g)
    g.add_argument("space")
    g.add_argument("generators", nargs="*")
    g.add_argument("--point", default=None, help="base the fiber functor over this point")
    g.add_argument("--max-degree", type=int, default=8)
    g.add_argument("--rounds", type=int, default=1)
    g.set_defaults(func=cmd_galois)
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args, out)
    except InputError as e:
        err.write(f"error: {e}\n")
        return 2
    except SchfinError as e:
        err.write(f"error: {type(e).__name__}: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
