import io as _io
import json
import subprocess
import sys

import pytest

from conftest import P
from morsejets import io
from morsejets.cli import run
from morsejets.jet import DiffeoJet

F2, G2 = "x**2+y**2", "x**2+4*y**2+x**3-y**3/2"


def write_pair(path, f, g):
    path.write_text(io.dumps_pair(f, g))
    return str(path)


def call(*argv):
    out = _io.StringIO()
    status, rep = run(list(argv) + ["--json"], out=out)
    assert json.loads(out.getvalue()) == json.loads(json.dumps(rep, default=str))
    return status, rep


def test_report_schema(tmp_path):
    a = write_pair(tmp_path / "a.germ", P(F2), P(G2))
    status, rep = call("invariants", "r", a)
    assert status == 0
    assert set(rep) == {"command", "inputs", "order", "mode", "result", "witnesses",
                        "residuals"}
    assert rep["order"] == 8 and rep["mode"] == "exact"


def test_equiv_r_round_trip_emits_diffeo(tmp_path):
    f, g = P(F2), P(G2)
    psi = DiffeoJet([P("x+y**2"), P("y+x*y")])
    a = write_pair(tmp_path / "a.germ", f, g)
    b = write_pair(tmp_path / "b.germ", *psi.pullback_many([f, g]))
    out = tmp_path / "phi.germ"
    status, rep = call("equiv", "r", a, b, "--order", "8", "--emit-diffeo", str(out))
    assert status == 0 and rep["result"]["equivalent"]
    phi = io.load_diffeo(str(out))
    assert phi.pullback(f).equals(psi.pullback(f))
    assert all(r["zero_through_order"] for r in rep["residuals"])
    status, rep = call("verify", a, b, "--diffeo", str(out), "--samples", "20")
    assert status == 0 and rep["residuals"][0]["samples"] == 20


def test_invariants_q(tmp_path):
    a = write_pair(tmp_path / "nf.germ", P(F2), P(G2))
    status, rep = call("invariants", "q", a)
    assert status == 0
    assert rep["result"]["lambda"] == ["1", "4"] and rep["result"]["alpha"][0] == "1"


def test_tangency_generators_cusp(tmp_path):
    a = write_pair(tmp_path / "cusp.germ", P("x**3+y**2+z**2", 3),
                   P("2*x**3+3*y**2+5*z**2", 3))
    status, rep = call("tangency", "generators", a)
    assert status == 0
    assert rep["result"]["generators"] == {"h12": "6*x^2*y", "h13": "18*x^2*z",
                                           "h23": "8*y*z"}
    assert "certificate" in rep["result"]


def test_negative_exit_code(tmp_path):
    a = write_pair(tmp_path / "a.germ", P(F2), P(G2))
    b = write_pair(tmp_path / "b.germ", P(F2), P("x**2+4*y**2+x**3-y**3/3"))
    status, rep = call("equiv", "r", a, b)
    assert status == 1 and rep["result"]["equivalent"] is False
    assert rep["witnesses"]


def test_hypothesis_exit_code(tmp_path):
    a = write_pair(tmp_path / "a.germ", P("2*x*y"), P("2*x*y+y**2"))
    status, rep = call("normalize", "diagonalize", a)
    assert status == 2 and rep["result"]["error"] == "NotDiagonalizable"


def test_input_error_exit_code(tmp_path):
    bad = tmp_path / "bad.germ"
    bad.write_text("vars=2 order=2 mode=exact\n5 0 : 1\n")
    assert call("invariants", "r", str(bad))[0] == 3
    assert call("invariants", "r", str(tmp_path / "missing.germ"))[0] == 3
    a = write_pair(tmp_path / "a.germ", P(F2), P(G2))
    assert call("equiv", "r", a)[0] == 3


def test_two_paths_instead_of_pair_file(tmp_path):
    (tmp_path / "f.germ").write_text(io.format_germ(P(F2)))
    (tmp_path / "g.germ").write_text(io.format_germ(P(G2)))
    status, rep = call("invariants", "cone", str(tmp_path / "f.germ"), str(tmp_path / "g.germ"))
    assert status == 0 and rep["result"]["mu"] == ["-3"]


def test_realize(tmp_path):
    spec = tmp_path / "curves.json"
    spec.write_text(json.dumps({"curves": [
        {"direction": [1, 0], "u": "t**2", "v": "t**2+t**3"},
        {"direction": [0, 1], "u": "t**2", "v": "4*t**2-t**3/2"}]}))
    status, rep = call("realize", str(spec), "-o", str(tmp_path / "out.germ"))
    assert status == 0
    f, g = io.load(str(tmp_path / "out.germ"))
    assert g.equals(P(G2))


def test_deterministic(tmp_path):
    a = write_pair(tmp_path / "a.germ", P(F2), P(G2))
    assert call("invariants", "f", a) == call("invariants", "f", a)


def test_module_entry_point(tmp_path):
    a = write_pair(tmp_path / "a.germ", P(F2), P(G2))
    r = subprocess.run([sys.executable, "-m", "morsejets", "invariants", "q", a],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "alpha" in r.stdout
