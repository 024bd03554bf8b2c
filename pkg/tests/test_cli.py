import cmath
import json
import math
import subprocess
import sys

import pytest

from sfl import catalog
from sfl.cli import run
from sfl.transform import read_pgm


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_group1(capsys):
    code, out, _ = call(capsys, "check", "catalog:group1")
    d = json.loads(out)
    assert code == 0 and d["schema"] == "sfl/1"
    r = d["report"]
    assert r["selfadjoint"] and r["hadamard"] and r["class"]["form"] == "N2"


def test_lattices_cantor3(capsys):
    code, out, _ = call(capsys, "lattices", "catalog:cantor3")
    d = json.loads(out)
    assert code == 0 and d["lattices"] == [] and "no selfadjoint lattice" in d["note"]


def test_lattices_group3(capsys):
    code, out, _ = call(capsys, "lattices", "catalog:group3")
    d = json.loads(out)
    assert code == 0 and d["count"] == 2 and d["complete"]


def test_muhat_reducible(capsys):
    code, out, _ = call(capsys, "muhat", "catalog:reducible2", "--at", "1/3", "0")
    (v,) = json.loads(out)["values"]
    s = 1 / 3
    target = cmath.exp(1j * math.pi * s) * math.sin(math.pi * s) / (math.pi * s)
    assert code == 0
    assert abs(complex(v["re"], v["im"]) - target) <= v["bound"] + 1e-12


def test_muhat_grid_csv_exact_zero(capsys):
    code, out, _ = call(capsys, "muhat", "catalog:group1", "--grid", "0:2:1/2", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "t1,re,im,bound" and len(lines) == 6
    assert lines[3] == "1,0.0,0.0,0.0"


def test_reports_are_byte_identical(capsys):
    a = call(capsys, "ortho", "catalog:group2", "--radius", "2", "--degree", "2")[1]
    b = call(capsys, "ortho", "catalog:group2", "--radius", "2", "--degree", "2")[1]
    assert a == b


def test_classify_and_spectrum(capsys):
    code, out, _ = call(capsys, "classify", "catalog:group3")
    d = json.loads(out)
    assert d["class"]["form"] == "N4" and "1/2" in d["class"]["orbit"]
    code, out, _ = call(capsys, "spectrum", "catalog:group1", "--call", "--degree", "2")
    d = json.loads(out)
    assert [p[0] for p in d["points"]] == ["0", "1", "4", "5", "16", "17", "20", "21"] and d["injective"]


def test_maximality_and_cuntz(capsys):
    code, out, _ = call(capsys, "maximality", "catalog:reducible2", "--candidates=-3:-1:1,0:1:1/2", "--degree", "4")
    d = json.loads(out)
    assert code == 0 and d["witnesses"] == [] and len(d["inconclusive"]) == 9
    code, out, _ = call(capsys, "cuntz", "catalog:group1", "--window", "3", "--pairs", "20")
    assert code == 0 and json.loads(out)["passed"]


def test_cuntz_failure_exit_code(capsys, tmp_path):
    s = catalog.system("group1").with_lattice([[4]])
    f = tmp_path / "broken.json"
    f.write_text(s.dumps())
    code, out, _ = call(capsys, "cuntz", str(f), "--window", "2", "--pairs", "5", "--degree", "2")
    assert code == 1 and json.loads(out)["ST_identity"]["witness"] is not None


def test_dual_and_export_round_trip(capsys, tmp_path):
    code, text, _ = call(capsys, "catalog", "export", "group2")
    f = tmp_path / "g2.json"
    f.write_text(text)
    code, dual, _ = call(capsys, "dual", str(f))
    g = tmp_path / "d.json"
    g.write_text(dual)
    code, back, _ = call(capsys, "dual", str(g))
    assert back == text


def test_attractor_outputs(capsys, tmp_path):
    code, out, _ = call(capsys, "attractor", "catalog:group1", "--depth", "1", "--format", "csv")
    assert out.splitlines() == ["x1,weight", "0.0,0.25", "0.125,0.25", "0.5,0.25", "0.625,0.25"]
    pgm = tmp_path / "s.pgm"
    code, _, _ = call(capsys, "attractor", "catalog:sierpinski2", "--depth", "6", "--render", "64x48", "--format", "pgm", "--out", str(pgm))
    img = read_pgm(pgm.read_bytes())
    assert code == 0 and img.shape == (48, 64) and img.any()


def test_bad_inputs(capsys, tmp_path):
    code, _, err = call(capsys, "check", str(tmp_path / "missing.json"))
    assert code == 2 and "ParseError" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 1,\n "R": [[4]] "B": []}')
    code, _, err = call(capsys, "check", str(bad))
    assert code == 2 and "line 2" in err
    code, _, err = call(capsys, "attractor", "catalog:sierpinski2", "--depth", "40")
    assert code == 2 and "budget" in err


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "sfl.cli", "catalog", "list"], capture_output=True, text=True)
    assert out.returncode == 0 and "quartic_u_i" in out.stdout
