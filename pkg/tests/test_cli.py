import csv
import io
import json

import pytest

from dscpsc.analysis.cli import main
from dscpsc.instance import instance_to_dict, save_instance
from dscpsc.synthetic import reference_tiny


@pytest.fixture
def tiny_path(tmp_path):
    path = tmp_path / "tiny.json"
    save_instance(reference_tiny(), path)
    return path


def test_validate_ok(tiny_path, capsys):
    assert main(["validate", str(tiny_path)]) == 0
    assert capsys.readouterr().out.strip() == "OK"


def test_validate_invalid(tmp_path, capsys):
    doc = instance_to_dict(reference_tiny())
    doc["params"]["mu"] = [0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert main(["validate", str(path)]) == 1
    assert "mu" in capsys.readouterr().err


def test_unreadable_file(tmp_path):
    assert main(["validate", str(tmp_path / "missing.json")]) == 1
    (tmp_path / "junk.json").write_text("{not json")
    assert main(["validate", str(tmp_path / "junk.json")]) == 1


def test_usage_errors(capsys):
    assert main([]) == 64
    assert main(["frobnicate"]) == 64
    assert main(["solve"]) == 64
    assert "usage" in capsys.readouterr().err


def test_build(tiny_path, tmp_path, capsys):
    mps = tmp_path / "m.mps"
    rep = tmp_path / "r.json"
    assert main(["build", str(tiny_path), "--emit-mps", str(mps), "--report", str(rep)]) == 0
    assert mps.read_text().startswith("NAME")
    doc = json.loads(rep.read_text())
    assert "families" in doc and "normalizations" in doc


def test_solve_and_report(tiny_path, tmp_path, capsys):
    out = tmp_path / "solve.json"
    assert main(["solve", str(tiny_path), "--backend", "embedded", "--output", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.startswith("lambda = ")
    assert "Stakeholder" in text and "Profit P_e" in text
    doc = json.loads(out.read_text())
    assert abs(float(text.split()[2]) - doc["lambda"]) < 1e-6
    assert main(["report", str(out), "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "stakeholder,profit,pollution,jobs,lambda"
    assert main(["report", str(tiny_path), "--format", "table"]) == 0
    assert "Cost category" in capsys.readouterr().out


def test_solve_infeasible_exit_2(tmp_path):
    inst = reference_tiny()
    path = tmp_path / "inf.json"
    save_instance(inst.with_params(d=inst.params.d * 1000), path)
    assert main(["solve", str(path)]) == 2


def test_budget_exceeded_exit_2(tiny_path):
    assert main(["solve", str(tiny_path), "--max-discrete", "2"]) == 2


def test_sensitivity_levels(tiny_path, tmp_path):
    out = tmp_path / "grid.csv"
    assert main(["sensitivity", str(tiny_path), "--levels", "-10,10", "--output", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["group", "level_pct", "stakeholder", "metric", "pct_change", "status"]
    per_stakeholder = [r for r in rows[1:] if r[2] == "e1"]
    assert len(per_stakeholder) == 8 * 2
    assert {r[1] for r in per_stakeholder} == {"-10", "10"}


def test_example_command(tmp_path, capsys):
    path = tmp_path / "ex.json"
    assert main(["example", "anti-loop", str(path)]) == 0
    assert main(["validate", str(path)]) == 0
