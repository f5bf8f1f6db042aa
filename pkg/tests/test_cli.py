import csv
import io
import json
import subprocess
import sys
from importlib import resources

import pytest

from confext.cli import main, parse_sweep_grid
from confext.poly import parse_poly


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def shipped(name):
    return resources.files("confext").joinpath("data", "algebras", f"{name}.lca").read_text(encoding="utf-8")


@pytest.mark.parametrize("name", ["vir", "hv", "sv", "esv"])
def test_axioms_builtin(name):
    code, text = run("axioms", name)
    assert code == 0
    assert "skew-symmetry: ok" in text and "jacobi: ok" in text


def test_axioms_broken_spec_file(tmp_path):
    broken = tmp_path / "broken.lca"
    broken.write_text(shipped("esv").replace("bracket N Y = Y", "bracket N Y = 2 Y"), encoding="utf-8")
    code, text = run("axioms", str(broken))
    assert code == 1
    assert "N, Y, Y" in text
    assert "-2*d - 2*l - 4*m" in text
    code, text = run("axioms", str(broken), "--output", "json")
    data = json.loads(text)
    assert code == 1 and not data["ok"]
    jac = next(a for a in data["axioms"] if a["axiom"] == "jacobi")
    assert any(v["at"] == ["N", "Y", "Y"] and "-2*d - 2*l - 4*m" in v["residual"] for v in jac["violations"])


def test_axioms_parse_error_location(tmp_path, capsys):
    bad = tmp_path / "bad.lca"
    bad.write_text("algebra bad\ngenerators: L\nbracket L L = (d + 2*l L\n", encoding="utf-8")
    code, _ = run("axioms", str(bad))
    assert code == 2
    assert ":3" in capsys.readouterr().err


def test_lie_relations():
    code, text = run("lie", "esv", "--max-index", "4")
    assert code == 0 and "[N_m, Y_p] = Y_{m+p}" in text
    code, text = run("lie", "vir", "--max-index", "3")
    relations = text.split("derivation:")[0].strip().splitlines()[1:]
    assert code == 0 and [r.strip() for r in relations] == ["[L_m, L_n] = (m - n) L_{m+n}"]
    assert run("lie", "esv", "--max-index", "6")[0] == 0
    assert run("lie", "vir", "--max-index", "1")[0] == 2


def test_ext_examples():
    code, text = run("ext", "esv", "--sub", "trivial:gamma=0", "--quot", "rank1:alpha=0,beta=-1,delta=-1/2")
    assert code == 0 and "ext_dim = 1" in text and "h=1" in text
    code, text = run("ext", "vir", "--sub", "rank1:alpha=0,delta=-4", "--quot", "rank1:alpha=0,delta=1")
    assert code == 0 and "ext_dim = 1" in text
    code, text = run("ext", "hv", "--sub", "rank1:alpha=0,beta=1,delta=0", "--quot",
                     "rank1:alpha=0,beta=1,delta=2", "--field", "q")
    assert code == 0 and "ext_dim = 2" in text


def test_ext_json_roundtrip():
    code, text = run("--output", "json", "ext", "vir", "--sub", "rank1:alpha=0,delta=-4", "--quot",
                     "rank1:alpha=0,delta=1")
    data = json.loads(text)
    assert code == 0 and data["ext_dim"] == 1 and data["degree_cap"] == 9
    f = data["representatives"][0]["f"]
    # the degree-6 class, printed in the solver's normalized form
    assert {sum(e) for e in parse_poly(f).terms} == {6}


def test_ext_usage_errors():
    assert run("ext", "vir", "--sub", "trivial:gamma=0", "--quot", "trivial:gamma=1")[0] == 2
    assert run("ext", "vir", "--sub", "rank1:alpha=0,delta=1+r19", "--quot", "trivial:gamma=0",
               "--field", "q")[0] == 2
    assert run("ext", "vir", "--sub", "rank1:delta=1", "--quot", "bogus")[0] == 2
    assert run("ext", "nosuchalgebra", "--sub", "trivial:gamma=0", "--quot", "rank1:delta=1")[0] == 2
    assert run("ext", "vir", "--sub", "trivial:gamma=0")[0] == 2
    assert run("--field", "q-sqrt:4", "ext", "vir", "--sub", "trivial:gamma=0", "--quot", "rank1:delta=1")[0] == 2


def test_global_flags_either_side_and_env(monkeypatch):
    args = ["ext", "vir", "--sub", "trivial:gamma=0", "--quot", "rank1:alpha=0,delta=2"]
    before = run("--output", "json", "--degree-cap", "4", *args)
    after = run(*args, "--output", "json", "--degree-cap", "4")
    assert before == after and json.loads(before[1])["degree_cap"] == 4
    monkeypatch.setenv("CONFEXT_DEGREE_CAP", "5")
    assert json.loads(run("--output", "json", *args)[1])["degree_cap"] == 5
    # below the needed degree the λ³ class is invisible
    assert json.loads(run("--output", "json", "--degree-cap", "2", *args)[1])["ext_dim"] == 0
    monkeypatch.setenv("CONFEXT_DEGREE_CAP", "x")
    assert run(*args)[0] == 2


def test_reproduce_exit_codes():
    code, text = run("reproduce", "--theorem", "thm-2.8")
    assert code == 0 and "thm-2.8: reproduced" in text
    assert run("reproduce", "--theorem", "nosuch")[0] == 2
    code, text = run("--output", "markdown", "reproduce", "--theorem", "thm-2.9")
    assert code == 0 and "| case | conditions | dim | polynomials |" in text
    code, text = run("--output", "json", "reproduce", "--theorem", "thm-3.2")
    assert code == 0 and json.loads(text)[0]["ok"]


def test_reproduce_sqrt19_field():
    code, text = run("--field", "q-sqrt:19", "reproduce", "--theorem", "thm-2.10")
    assert code == 0 and "reproduced" in text
    code, text = run("--field", "q", "reproduce", "--theorem", "thm-2.10")
    assert code == 0 and "2 points outside field q" in text


def test_sweep_esv_zero_eigenvalue_profile():
    code, text = run("--output", "json", "sweep", "esv", "--type", "3",
                     "--grid", "alpha=0 abar=0 beta=0 bbar=0 dbar=1 gap=-2..8 delta=dbar+gap")
    assert code == 0
    recs = json.loads(text)
    # gap -1 puts delta at 0, a reducible quotient, so that point is dropped
    assert [r["gap"] for r in recs][:2] == ["-2", "0"]
    assert [r["ext_dim"] for r in recs] == [0, 3, 1, 2, 1, 1, 0, 0, 0, 0]
    code, text = run("--output", "json", "sweep", "esv", "--type", "3",
                     "--grid", "alpha=0 abar=0 beta=0 bbar=0 dbar=-4,-2 delta=1")
    sporadic = {r["dbar"]: (r["ext_dim"], r["sporadic"]) for r in json.loads(text)}
    assert sporadic == {"-4": (1, True), "-2": (2, True)}


def test_sweep_csv_and_json_agree(tmp_path):
    grid = "alpha=0 gamma=0 delta=-1..3:1/2"
    out_csv, out_json = tmp_path / "s.csv", tmp_path / "s.json"
    assert run("--output", "csv", "sweep", "sv", "--type", "1", "--grid", grid, "--out", str(out_csv))[0] == 0
    assert run("--output", "json", "sweep", "sv", "--type", "1", "--grid", grid, "--out", str(out_json))[0] == 0
    rows = list(csv.DictReader(out_csv.open(encoding="utf-8")))
    recs = json.loads(out_json.read_text(encoding="utf-8"))
    assert len(rows) == len(recs) == 8
    for row, rec in zip(rows, recs):
        typed = dict(row, ext_dim=int(row["ext_dim"]), sporadic=row["sporadic"] == "true")
        assert typed == rec
    assert [r["delta"] for r in recs if r["ext_dim"]] == ["-1/2", "1", "2"]


def test_sweep_errors(tmp_path):
    assert run("sweep", "vir", "--type", "1", "--grid", "")[0] == 2
    assert run("sweep", "vir", "--type", "1", "--grid", "delta=0")[0] == 2
    assert run("sweep", "vir", "--type", "4", "--grid", "delta=1")[0] == 2
    assert run("sweep", "vir", "--type", "1", "--grid", "delta=1", "--out",
               str(tmp_path / "missing" / "x.csv"))[0] == 1


def test_parse_sweep_grid_lets():
    grid = parse_sweep_grid("alpha=0,7/3 gamma=-alpha delta=1..2")
    pts = grid.points()
    assert len(pts) == 4 and all(p["gamma"] == -p["alpha"] for p in pts)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "confext", "axioms", "vir"], capture_output=True, text=True)
    assert proc.returncode == 0 and "jacobi: ok" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "confext"], capture_output=True, text=True)
    assert proc.returncode == 2
