import io
import json
import os
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schfin.cli import main
from schfin.finalg import OmegaTower
from schfin.serialize import InputError, Writer, dump_workspace, load, parse_workspace, to_json

from corpus import random_projection_space

DATA = os.path.join(os.path.dirname(__file__), "..", "data", "examples.json")


def run(*argv, stdin=None):
    out, err = io.StringIO(), io.StringIO()
    old = sys.stdin
    if stdin is not None:
        sys.stdin = io.StringIO(stdin)
    try:
        code = main(list(argv), out=out, err=err)
    finally:
        sys.stdin = old
    return code, out.getvalue(), err.getvalue()


def examples():
    with open(DATA) as fh:
        return json.load(fh)


def test_check_xv_schematic():
    code, out, _ = run("check", DATA, "Xv", "schematic")
    assert code == 0 and "holds" in out


def test_check_pseudocircle_witness():
    code, out, _ = run("check", DATA, "pseudocircle", "schematic", "--json")
    assert code == 1
    w = json.loads(out)["witness"]
    assert (w["x"], w["edge"], w["degree"]) == ("y1", ["x1", "y2"], 0)


def test_dangling_stalk_name(tmp_path):
    doc = examples()
    doc["spaces"]["Xv"]["stalk"]["a"] = "nope"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run("check", str(path), "Xv", "schematic")
    assert code == 2
    assert "spaces.Xv.stalk.a" in err and "nope" in err


@pytest.mark.parametrize(
    "obj, prop, expected",
    [
        ("chain", "finite", 0),
        ("dual_chain", "finite", 1),
        ("diagonal_chain", "schematic", 1),
        ("collapse", "qciso", 0),
        ("collapse", "schematic", 0),
        ("O_Xv", "qcoh", 0),
        ("F4_X0", "etale-cover", 0),
        ("F4_chain", "qcoh", 0),
        ("X0", "affine", 0),
        ("Xv", "qciso", 2),
    ],
)
def test_check_codes(obj, prop, expected):
    code, _, _ = run("check", DATA, obj, prop, "--oracle")
    assert code == expected


def test_pw_of_xv_is_two_chains():
    code, out, _ = run("construct", DATA, "pw", "Xv")
    assert code == 0
    ws = parse_workspace(json.loads(out))
    pw = ws.spaces["pw(Xv)"]
    comps = pw.poset.components()
    assert len(comps) == 2 and all(len(c) == 2 for c in comps)
    assert len(pw.poset.hasse) == 2


def test_points_of_chain():
    code, out, _ = run("construct", DATA, "points", "chain")
    doc = json.loads(out)
    assert code == 0
    assert [p["max_rep"] for p in doc["points"]] == [["a", 1], ["b", 0]]


def test_relspec_of_f4():
    code, out, _ = run("construct", DATA, "relspec", "X0", "F4_X0")
    ws = parse_workspace(json.loads(out))
    top = ws.spaces["spec(F4_X0)"]
    assert code == 0 and len(top.points) == 1
    assert top.stalk[top.points[0]] == OmegaTower(2).field(2)


def test_trivialize_certificate_output():
    code, out, _ = run("construct", DATA, "trivialize", "X0", "F4xF2_X0")
    doc = json.loads(out)
    assert code == 0 and doc["certificate"]["n"] == 3
    assert len(doc["certificate"]["sections"]) == 3
    parse_workspace(doc)


@pytest.mark.parametrize(
    "verb, args",
    [
        ("components", ["Xv"]),
        ("fiber-product", ["collapse", "collapse"]),
        ("stein", ["collapse"]),
        ("cylinder", ["collapse"]),
    ],
)
def test_constructions_emit_workspaces(verb, args):
    code, out, _ = run("construct", DATA, verb, *args)
    assert code == 0
    ws = parse_workspace(json.loads(out))
    assert to_json(dump_workspace(ws)) == out


def test_fiber_product_of_collapse_has_four_points():
    _, out, _ = run("construct", DATA, "fiber-product", "collapse", "collapse")
    ws = parse_workspace(json.loads(out))
    assert len(ws.spaces["collapsexcollapse"].points) == 4


def test_geometric_points_respect_tower():
    code, out, _ = run("construct", DATA, "geometric-points", "X0", "--omega-degree", "3")
    doc = json.loads(out)
    assert code == 0 and doc["omega_degree"] == 3 and len(doc["geometric_points"]) == 1


def test_galois_f4():
    code, out, _ = run("galois", DATA, "X0", "F4_X0", "--max-degree", "4")
    assert code == 0
    assert out.startswith("PASS")
    assert sum(line.strip().startswith("axiom") for line in out.splitlines()) == 5


def test_galois_f4_f8_table():
    code, out, _ = run("galois", DATA, "X0", "F4_X0", "F8_X0", "--max-degree", "8", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["ok"] and len(doc["axioms"]) == 5
    rows = {m["name"]: m for m in doc["family"]}
    assert rows["F8_X0"]["fiber_size"] == 3 and rows["F8_X0"]["frobenius_cycles"] == [3]
    assert rows["F4_X0"]["frobenius_cycles"] == [2]


def test_galois_disconnected():
    code, _, err = run("galois", DATA, "Xv")
    assert code == 2 and "space not connected" in err


def test_stdin_and_determinism():
    text = open(DATA).read()
    a = run("construct", "-", "pw", "Xv", stdin=text)
    b = run("construct", DATA, "pw", "Xv")
    assert a == b
    g1 = run("galois", DATA, "X0", "F4_X0", "--max-degree", "4", "--json")
    g2 = run("galois", DATA, "X0", "F4_X0", "--max-degree", "4", "--json")
    assert g1 == g2


@pytest.mark.parametrize(
    "mutate, where",
    [
        (lambda d: d.update(p=4), "p"),
        (lambda d: d["algebras"]["F4"]["one"].__setitem__(0, 2), "algebras.F4.one"),
        (lambda d: d["algebras"]["F4"]["one"].__setitem__(0, 1.0), "algebras.F4.one"),
        (lambda d: d["spaces"]["chain"]["res"].clear(), "spaces.chain.res"),
        (lambda d: d["spaces"]["chain"]["hasse"].append(["a", "zz"]), "spaces.chain.hasse"),
        (lambda d: d["morphisms"]["collapse"]["assignment"].__setitem__("a", "q"), "morphisms.collapse.assignment.a"),
        (lambda d: d["algebra_sheaves"].__setitem__("Xv", d["algebra_sheaves"]["F4_X0"]), "algebra_sheaves.Xv"),
    ],
)
def test_input_errors_name_location(tmp_path, mutate, where):
    doc = examples()
    mutate(doc)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run("check", str(path), "X0", "finite")
    assert code == 2 and where in err


def test_invalid_json_and_missing_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run("check", str(path), "X0", "finite")[0] == 2
    assert run("check", str(tmp_path / "missing.json"), "X0", "finite")[0] == 2
    assert run("check", DATA, "X0", "no-such-property")[0] == 2


def test_non_associative_algebra_is_rejected():
    doc = examples()
    doc["algebras"]["F2xF2"]["mul"][0][1] = [0, 1]
    with pytest.raises(InputError) as e:
        parse_workspace(doc)
    assert e.value.location == "algebras.F2xF2"


def test_examples_file_is_canonical():
    ws = load(DATA)
    assert to_json(dump_workspace(ws)) == open(DATA).read()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from([2, 3]))
def test_round_trip(seed, p):
    rng = np.random.default_rng(seed)
    X = None
    while X is None:
        X = random_projection_space(rng, p, max_points=4, max_locals=2)
    w = Writer(p)
    w.add_space("X", X)
    w.add_module_sheaf("O", X.structure_sheaf(), "X")
    text = to_json(w.document())
    ws = parse_workspace(json.loads(text))
    Y = ws.spaces["X"]
    assert Y.points == X.points and Y.poset.hasse == X.poset.hasse
    assert all(Y.stalk[x] == X.stalk[x] for x in X.points)
    assert all(Y.res[e] == X.res[e] for e in X.poset.hasse)
    assert to_json(dump_workspace(ws)) == text
