import json
import subprocess
import sys
from fractions import Fraction

import pytest

from legendrian_persistence.cli import main
from legendrian_persistence.docio import dumps, loads
from legendrian_persistence.grading import rpn_link_dga
from legendrian_persistence.pwc import PWCScript
from legendrian_persistence.barcode import Birth
from legendrian_persistence.complexes import FilteredComplex
from legendrian_persistence.randgen import random_rfc_input, trefoil_dga

PAIR = FilteredComplex([("x", 1, 3), ("y", 0, 1)], [[0, 0], [1, 0]])


@pytest.fixture
def files(tmp_path):
    def write(name, kind, payload):
        path = tmp_path / name
        path.write_text(dumps(kind, payload))
        return str(path)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_barcode_of_pair(capsys, files):
    path = files("pair.json", "complex", PAIR)
    code, out, _ = run(capsys, "barcode", path)
    assert code == 0 and out.split("\n")[1].split() == ["0", "1", "3"]
    code, out, _ = run(capsys, "barcode", path, "--format", "json")
    assert json.loads(out)["bars"] == [{"degree": 0, "start": "1/1", "end": "3/1"}]


def test_barcode_window_and_svg(capsys, files):
    path = files("pair.json", "complex", PAIR)
    code, out, _ = run(capsys, "barcode", path, "--window", "2,10", "--format", "json")
    assert json.loads(out)["bars"] == [{"degree": 1, "start": "3/1", "end": "inf"}]
    code, out, _ = run(capsys, "barcode", path, "--format", "svg")
    assert code == 0 and out.startswith("<svg") and "[1, 3)" in out


def test_validate_and_field_conflict(capsys, files):
    path = files("pair.json", "complex", PAIR)
    assert run(capsys, "validate", path)[0] == 0
    code, _, err = run(capsys, "barcode", path, "--field", "3")
    assert code == 1 and "field" in err


def test_validate_reports_bad_dga(capsys, tmp_path):
    doc = {"kind": "dga", "version": 1,
           "generators": [{"name": "a", "degree": 1, "action": "1/1"},
                          {"name": "b", "degree": 0, "action": "2/1"}],
           "differential": {"a": "b"}}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, err = run(capsys, "validate", str(path))
    assert code == 1 and "filtration" in (out + err)


def test_parse_error_exit_code(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"kind": "complex", "version": 1, "basis": [{"name": "x", "degree": 0, "action": "1/0"}]}')
    code, _, err = run(capsys, "barcode", str(path))
    assert code == 1 and "$.basis[0].action" in err


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "barcode", str(tmp_path / "missing.json"))[0] == 2
    code, _, err = run(capsys, "rpn")
    assert code == 2 and "--n" in err
    code, _, err = run(capsys, "grade", "--n", "2", "--format", "svg")
    assert code == 2


def test_augment_and_linearize(capsys, files):
    path = files("tref.json", "dga", trefoil_dga())
    code, out, _ = run(capsys, "augment", path)
    assert code == 0 and out.startswith("5 augmentation(s)")
    code, out, _ = run(capsys, "linearize", path, "--aug", "b3=1")
    assert code == 0 and "H_0 = 2, H_1 = 1" in out
    code, _, err = run(capsys, "linearize", path, "--aug", "b2=1")
    assert code == 1


def test_cone_from_link_and_counts(capsys, files):
    link, eps, counts, n = random_rfc_input(12)
    lpath = files("link.json", "link_dga", link)
    cpath = files("counts.json", "counts", counts)
    aug = ",".join(f"{k}={v}" for k, v in eps.values.items())
    code, out, _ = run(capsys, "cone", lpath, "--counts", cpath, "--n", str(n), "--aug", aug,
                       "--format", "json")
    assert code == 0
    body = json.loads(out)
    assert loads(json.dumps(body["complex"])).kind == "complex"


def test_rpn_json(capsys):
    code, out, _ = run(capsys, "rpn", "--n", "2", "--window", "0,10", "--format", "json")
    body = json.loads(out)
    assert code == 0 and not body["acyclic"]
    degs = sorted(b["degree"] for b in body["complex"]["basis"])
    assert degs == list(range(len(degs))) and len(degs) >= 12
    assert all(b["end"] == "inf" for b in body["barcode"]["bars"])


def test_grade_text(capsys):
    code, out, _ = run(capsys, "grade", "--n", "2")
    assert code == 0
    assert "minimal perturbed orbit degree: 4" in out
    assert "minimal perturbed chord degree: 2" in out
    code, out, _ = run(capsys, "grade", "--n", "1", "--plane", "1,2", "--format", "json")
    assert json.loads(out)["plane_index"] == 4


def test_evolve_frames(capsys, files):
    C = FilteredComplex([("e", 0, 10)], None)
    half = Fraction(1, 2)
    script = PWCScript((0, 1), C, {"x": ((half, 5), (1, 6)), "y": ((half, 5), (1, 4))}, None,
                       [(half, Birth("x", "y", 1, 5, 5))])
    path = files("script.json", "pwc_script", script)
    code, out, _ = run(capsys, "evolve", path, "--format", "json", "--samples", "3/4")
    frames = json.loads(out)["frames"]
    assert code == 0 and [f["t"] for f in frames] == ["0/1", "1/2", "3/4", "1/1"]
    assert len(frames[-1]["barcode"]["bars"]) == 2


def test_bounds_subcommands(capsys):
    code, out, _ = run(capsys, "bounds", "main-theorem", "--betti", "1,1", "--k", "1",
                       "--osc", "1/10", "--lengths", "1/2,1")
    assert code == 0 and out.strip() == "main_theorem: 2"
    code, out, _ = run(capsys, "bounds", "scf", "--values", "3/5,4/5,1", "--eps", "1/10")
    assert "1/500" in out
    code, out, _ = run(capsys, "bounds", "trace", "--f-min=-1/10", "--f-max", "1/5", "--eps", "1/100",
                       "--format", "json")
    assert code == 0 and "0.8236803045" in out
    code, out, _ = run(capsys, "bounds", "simulate", "--betti", "1,1,1", "--lengths", "3/4,1",
                       "--osc", "1/2", "--k", "2", "--steps", "4", "--format", "json")
    assert code == 0 and json.loads(out)["simulate"]["holds"]


def test_destab(capsys, tmp_path):
    doc = {"kind": "dga", "version": 1,
           "generators": [{"name": "x", "degree": 1, "action": "2/1"},
                          {"name": "y", "degree": 0, "action": "1/1"},
                          {"name": "c", "degree": 0, "action": "3/1"}],
           "differential": {"x": "y"}}
    path = tmp_path / "stab.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "destab", str(path), "--pair", "x,y", "--format", "json")
    assert code == 0
    assert [g["name"] for g in json.loads(out)["dga"]["generators"]] == ["c"]


def test_suites_are_reproducible(capsys):
    first = run(capsys, "validate", "--suite", "events", "--count", "10", "--seed", "4")
    second = run(capsys, "validate", "--suite", "events", "--count", "10", "--seed", "4")
    assert first == second and first[0] == 0


def test_module_entry_point(tmp_path):
    path = tmp_path / "pair.json"
    path.write_text(dumps("complex", PAIR))
    cmd = [sys.executable, "-m", "legendrian_persistence", "barcode", str(path), "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, text=True)
    b = subprocess.run(cmd, capture_output=True, text=True)
    assert a.returncode == 0 and a.stdout == b.stdout


def test_link_document_with_pi_actions(capsys, files):
    path = files("rp.json", "link_dga", rpn_link_dga(1, (-3, 3)))
    code, out, _ = run(capsys, "cone", path, "--n", "1", "--format", "json")
    assert code == 0
    assert all(b["end"] == "inf" for b in json.loads(out)["barcode"]["bars"])
