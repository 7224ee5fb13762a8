import json

import pytest

from diracshell.cli import main

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *args):
    code, out, _ = run(capsys, *args)
    return code, json.loads(out)


def test_classify_zigzag(capsys):
    code, rep = run_json(capsys, "classify", "--eta", "0", "--tau", "0", "--lambda", "2", "--m", "1", "--N", "64")
    assert code == EXIT_OK
    assert rep["schema"] == "dirac-shell/1"
    assert rep["regime"] == "critical" and rep["confinement"] and rep["zigzag"]
    assert rep["config"]["lambda"] == 2.0


def test_classify_trivial_and_extra_point(capsys):
    _, rep = run_json(capsys, "classify", "--m", "1", "--N", "64")
    assert rep["regime"] == "trivial"
    _, rep = run_json(capsys, "classify", "--eta", "2", "--m", "1", "--N", "64")
    assert rep["extra_essential_point"] == 0.0


def test_spec1d(capsys):
    _, rep = run_json(capsys, "spec1d", "--eta", "1", "--m", "1")
    assert rep["eigenvalues"] == pytest.approx([-0.6], abs=1e-15)
    _, rep = run_json(capsys, "spec1d")
    assert rep["eigenvalues"] == []
    _, rep = run_json(capsys, "spec1d", "--eta", "2", "--m", "1")
    assert rep["eigenvalues"] == [0.0]
    assert rep["closed_form"][0]["branch"] == "d_equals_4"


@pytest.mark.parametrize("args", [
    ("spec1d", "--eta", "1", "--m", "0"),
    ("spec1d", "--eta", "1", "--m", "-1"),
    ("spec2d", "--curve", "blob", "--eta", "-3"),
    ("spec2d", "--curve", "circle:r=-1"),
    ("spec2d", "--N", "15"),
    ("spec2d", "--m", "0"),
])
def test_usage_errors(capsys, args):
    code, _, err = run(capsys, *args)
    assert code == EXIT_USAGE
    assert err.startswith("error:")


def test_spec2d_zero_strengths_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "spec2d", "--N", "32", "--zgrid", "9", "--format", "csv",
                       "--out", str(tmp_path))
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "z,sigma_min" and len(lines) == 10
    assert all(float(l.split(",")[1]) == 1.0 for l in lines[1:])
    rep = json.loads((tmp_path / "spec2d.json").read_text())
    assert rep["eigenvalues"] == []
    assert (tmp_path / "scan.csv").exists()


def test_spec2d_strong_well(capsys):
    code, rep = run_json(capsys, "spec2d", "--curve", "circle:r=1", "--eta", "-3", "--m", "1",
                         "--N", "64", "--zgrid", "120")
    assert code == EXIT_OK
    assert len(rep["eigenvalues"]) >= 1
    for pair in rep["eigenpairs"]:
        cert = pair["certificate"]
        assert pair["accepted"]
        assert cert["sigma_min"] < 1e-6 and cert["convergence"] < 1e-6 and cert["jump_residual"] < 1e-4


def test_spec2d_verify_only(capsys):
    code, rep = run_json(capsys, "spec2d", "--verify-only", "--N", "64")
    assert code == EXIT_OK
    assert "eigenvalues" not in rep
    assert rep["oracles"]["cinv_residual"] < 1e-10


@pytest.mark.parametrize("extra", [(), ("--quick",)])
def test_verify_passes(capsys, extra):
    code, rep = run_json(capsys, "verify", *extra)
    assert code == EXIT_OK and rep["passed"]
    assert len(rep["checks"]) == 11


def test_verify_corrupt_representation(capsys):
    code, rep = run_json(capsys, "verify", "--quick", "--corrupt-representation")
    assert code == EXIT_FAIL
    assert not rep["passed"]
    failed = [c["name"] for c in rep["checks"] if not c["passed"]]
    assert "anticommutation" in failed
