import json

import pytest

from biharm import cli
from biharm.catalog import HARMONIC, NOT_BIHARMONIC, PROPER

CUSTOM = """\
# half-plane family written out by hand
name = halfplane
pi1 = y
pi2 = z
g11 = a^2*(1+b^2)/y^2
g13 = b*a/y
g22 = a^2/y^2  # inline comments are allowed
h11 = a^2/u^2
h22 = 1/(1+b^2)
eta1_u = u/a
eta1_v = 0
eta2_u = 0
eta2_v = sqrt(1+b^2)
lower = -1, 0.25, -1
upper = 1, 2, 1
constraints = y
param_a = 2
param_b = 1
"""


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "argv, verdict",
    [
        (["verify", "pr1", "--a", "1", "--b", "0"], PROPER),
        (["verify", "nil"], NOT_BIHARMONIC),
        (["verify", "flat", "--tol-b", "1e-6"], HARMONIC),
    ],
)
def test_verify(capsys, argv, verdict):
    code, out, _ = run(capsys, *argv, "--points", "20")
    doc = json.loads(out)
    assert code == 0
    assert doc["aggregate"]["verdict"] == verdict
    assert list(doc)[:5] == ["schema_version", "entry", "params", "points", "aggregate"]
    assert len(doc["points"]) == 20


def test_verify_csv_to_file(tmp_path, capsys):
    out = tmp_path / "nil.csv"
    code, _, _ = run(capsys, "verify", "nil", "--points", "4", "--format", "csv", "--out", str(out))
    lines = out.read_text().splitlines()
    assert code == 0
    assert lines[0].startswith("x,y,z,r1,r2,tension,K_N")
    assert len(lines) == 5


def test_custom_spec(tmp_path, capsys):
    cfg = tmp_path / "custom.ini"
    cfg.write_text(CUSTOM)
    code, out, _ = run(capsys, "verify", "--config", str(cfg), "--points", "10")
    assert code == 0
    doc = json.loads(out)
    assert doc["entry"] == "halfplane"
    assert doc["aggregate"]["verdict"] == PROPER
    assert doc["aggregate"]["max_tension"] == pytest.approx(0.5)


def test_custom_spec_not_riemannian(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(CUSTOM.replace("h22 = 1/(1+b^2)", "h22 = 4"))
    code, _, err = run(capsys, "verify", "--config", str(cfg), "--points", "5")
    assert code == 3
    assert "not a Riemannian submersion" in err


def test_config_overrides(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("entry = pr1\na = 2\nb = 3\npoints = 7\n")
    code, out, _ = run(capsys, "verify", "--config", str(cfg), "--points", "3")
    doc = json.loads(out)
    assert code == 0 and doc["params"] == {"a": 2.0, "b": 3.0} and len(doc["points"]) == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "nosuch"],
        ["verify", "pr1", "--a=-1"],
        ["verify"],
        ["verify", "nil", "--points", "0"],
        ["verify", "nil", "--tol-h", "-1"],
        ["verify", "nil", "--m", "1"],
        ["verify", "pr1", "--a", "1,2"],
        ["verify", "--config", "/nonexistent/run.ini"],
        ["sweep", "pr1", "--a", "x"],
        ["verify", "nil", "--format", "xml"],
    ],
)
def test_config_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_bad_expression(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(CUSTOM.replace("g22 = a^2/y^2", "g22 = open('x')"))
    assert run(capsys, "verify", "--config", str(cfg))[0] == 2


def test_sweep_bcv_z(capsys):
    code, out, _ = run(capsys, "sweep", "bcv-z", "--m=-1,0,1", "--l", "0,2", "--points", "8")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == ",".join(cli.SWEEP_HEADER)
    assert len(lines) == 7
    assert all(",harmonic,harmonic," in row for row in lines[1:])


def test_sweep_json(capsys):
    code, out, _ = run(capsys, "sweep", "pr1", "--a", "1", "--b", "0,1", "--points", "5", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert [r["model"] for r in doc["rows"]] == ["H2xR", "SL2R~"]
    assert all(r["verdict"] == PROPER for r in doc["rows"])


def test_sweep_records_errors_in_row():
    row = cli.sweep_row("pr1", {"a": -1.0, "b": 0.0}, cli.bh.SamplePlan(3), cli.bh.Tolerances())
    assert row[6] == "error" and "a must be positive" in row[-1]


def test_sweep_parallel_matches_serial(capsys):
    argv = ["sweep", "bcv-z", "--m=-0.25,0.25", "--l", "0,1", "--points", "6"]
    serial = run(capsys, *argv)[1]
    parallel = run(capsys, *argv, "--jobs", "2")[1]
    assert serial == parallel


@pytest.mark.parametrize("argv", [["--bcv", "-0.25", "0"], ["nil"], ["--bcv", "1", "2"], ["pr1", "--b", "1"]])
def test_identities(capsys, argv):
    code, out, _ = run(capsys, "identities", *argv, "--points", "10")
    doc = json.loads(out)
    assert code == 0 and doc["ok"]
    for name, check in doc["checks"].items():
        assert check["max_residual"] < check["tol"], name


def test_identities_bcv_reports_model(capsys):
    code, out, _ = run(capsys, "identities", "--bcv", "1", "2", "--points", "5")
    doc = json.loads(out)
    assert doc["model"] == "Sphere3"
    assert doc["checks"]["bcv_curvature"]["max_residual"] < 1e-9


def test_identities_csv(capsys):
    code, out, _ = run(capsys, "identities", "flat", "--points", "5", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "check,max_residual,tol,ok"
