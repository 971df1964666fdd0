import json
from fractions import Fraction
from pathlib import Path

from click.testing import CliRunner

from rumin_lab import cli
from rumin_lab.stokes_lab import ClassicalReport

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(*args):
    result = CliRunner().invoke(cli.main, [str(a) for a in args])
    return result


def run_json(*args, code=0):
    result = run(*args, "--format", "json")
    assert result.exit_code == code, result.output
    data = json.loads(result.stdout)
    assert data["schema"] == 1
    return data


def test_version():
    result = run("--version")
    assert result.exit_code == 0 and "0.1.0" in result.output


def test_validate_group_and_bad_group():
    data = run_json("validate", "cartan")
    assert json.dumps(data)
    bad = run("validate", CONFIGS / "bad_group.cfg")
    assert bad.exit_code == 2
    assert "GradingViolation" in bad.stderr


def test_validate_experiment_file():
    run_json("validate", CONFIGS / "heisenberg_stokes.cfg")
    run_json("validate", CONFIGS / "engel.toml")


def test_complex_table():
    result = run("complex", "--group", "h1xr", "--degree", "2")
    assert result.exit_code == 0
    run_json("complex", "--group", "h1xr", "--degree", "2")


def test_dc_command():
    run_json("dc", "--group", "h1", "--form", "x3 t1")
    bad = run("dc", "--group", "h1", "--form", "t3")
    assert bad.exit_code == 2 and "NotRuminForm" in bad.stderr


def test_parse_error_is_reported_with_caret():
    bad = run("dc", "--group", "h1", "--form", "x1 + t7")
    assert bad.exit_code == 2
    assert "^" in bad.stderr


def test_spectral_and_integrate():
    spec = run_json("spectral", "--group", "h1xr", "--form", "x2 t1", "--j", 1)
    assert spec["delta"] == "-t1^t2"
    data = run_json("integrate", "--chain", "h1xr_deg3_graph", "--form", "t3^t4")
    assert Fraction(data["integral"]) == 1


def test_integrate_from_toml_chain():
    data = run_json("integrate", "--chain", CONFIGS / "h1_square.toml", "--form", "t1^t2")
    assert Fraction(data["integral"]) == 1


def test_degree_and_rmanifold():
    data = run_json("degree", "--chain", CONFIGS / "h1_graph_chain.toml")
    assert data["summary"]["degree"] == 3 and data["summary"]["boundary_degree"] == 2
    run_json("rmanifold", "--chain", "h1xr_lens")


def test_stokes_run_outside_hypotheses_exits_zero():
    data = run_json("stokes", "run", CONFIGS / "h1xr_counterexample.cfg", "--workers", 2)
    first = data["reports"][0]
    assert first["discrepancy"] == "1/2" and first["status"] == "outside hypotheses"


def test_stokes_run_heisenberg():
    data = run_json("stokes", "run", CONFIGS / "heisenberg_stokes.cfg")
    assert all(r["status"] == "ok" for r in data["reports"])


def test_stokes_run_violation_exits_one(monkeypatch):
    fake = lambda G, chain, alpha: ClassicalReport(alpha.to_str(), Fraction(1), Fraction(0))
    monkeypatch.setattr(cli, "run_classical_stokes", fake)
    data = run_json("stokes", "run", CONFIGS / "h1xr_counterexample.cfg", code=1)
    assert any(r["status"] == "violation" for r in data["reports"])


def test_comass_and_mass():
    data = run_json("comass", "--group", "h2", "--form", "t1^t2 - t3^t4", "--weight", 2, "--samples", 256)
    assert data
    run_json("mass", "--chain", CONFIGS / "h1_square.toml")


def test_unknown_group_is_an_input_error():
    assert run("complex", "--group", "nowhere", "--degree", "1").exit_code == 2


def test_fixtures_listing():
    data = run_json("fixtures", "--group", "h1xr")
    assert data
