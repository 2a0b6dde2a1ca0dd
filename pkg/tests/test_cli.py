import json
import math
import subprocess
import sys

import pytest

from phaseshift import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("text,want", [
    ("1.5", 1.5), ("60deg", math.pi / 3), ("pi", math.pi), ("pi/3", math.pi / 3),
    ("5pi/6", 5 * math.pi / 6), ("2*pi/3", 2 * math.pi / 3),
])
def test_parse_angle(text, want):
    assert cli.parse_angle(text) == pytest.approx(want, abs=1e-15)


def test_parse_grid():
    assert cli.parse_grid("0:pi:3") == [0.0, math.pi / 2, math.pi]
    assert cli.parse_grid("0.1,0.2") == [0.1, 0.2]


def test_deviation_degrees(capsys):
    assert run(capsys, "deviation", "--theta", "60deg", "--eps", "0.5") == (0, "0.125\n", "")


def test_zero_point(capsys):
    assert run(capsys, "zero-point", "--eps", "0.75")[1] == "3.141592653589793\n"


def test_digits(capsys):
    assert run(capsys, "zero-point", "--eps", "0.75", "--digits", "15")[1] == "3.14159265358979\n"


@pytest.mark.parametrize("argv,want", [
    (["gap", "--theta", "pi/2", "--eps", "0.5"], -0.125),
    (["threshold", "--theta", "pi"], 0.6),
    (["rho", "--theta", "pi/2"], 5 / 3),
    (["ratio", "--theta", "pi", "--eps", "1"], 3.0),
    (["kappa", "--range", "0:0.5"], 0.1618804316),
    (["avg-zero-point", "--range", "0:0.5", "--degrees"], 72.13033),
])
def test_scalar_commands(capsys, argv, want):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and float(out) == pytest.approx(want, abs=1e-5)


def test_classify(capsys):
    assert run(capsys, "classify", "--theta", "pi", "--eps", "0.7")[1] == "BelowCube\n"


def test_json_scalar(capsys):
    _, out, _ = run(capsys, "rho", "--theta", "pi", "--format", "json")
    assert json.loads(out) == {"rho": 3.0}


def test_recurse(capsys):
    code, out, _ = run(capsys, "recurse", "--theta", "pi/3", "--eps", "0.9", "--depth", "2",
                       "--dim", "8", "--format", "json")
    data = json.loads(out)
    assert data["epsilons"] == pytest.approx([0.9, 0.729, 0.387420489], rel=1e-12)
    assert data["simulated"] == pytest.approx(data["epsilons"], abs=1e-8)


def test_recurse_csv(capsys):
    _, out, _ = run(capsys, "recurse", "--theta", "pi", "--eps", "0.75", "--depth", "1", "--format", "csv")
    assert out.splitlines()[0] == "m,eps"


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--hadamard", "2", "--theta", "pi", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["sim_deviation"] == pytest.approx(0.0, abs=1e-15)
    _, out, _ = run(capsys, "simulate", "--dim", "8", "--eps", "0.5", "--theta", "pi/2", "--format", "json")
    assert json.loads(out)["abs_discrepancy"] <= 1e-10


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "--thetas", "0:pi:3", "--eps-grid", "0.25,0.5",
                       "--quantities", "deviation,gap", "--cross-check", "8", "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "theta_rad,eps,deviation,gap,sim_deviation,abs_discrepancy"
    assert len(lines) == 7


def test_sweep_spec_file(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"theta_grid": [1.0471975511965976], "eps_grid": [0.5]}))
    out_file = tmp_path / "out.json"
    code, out, _ = run(capsys, "sweep", "--spec", str(spec), "--format", "json", "-o", str(out_file))
    assert code == 0 and out == ""
    assert json.loads(out_file.read_text()) == [{"theta_rad": math.pi / 3, "eps": 0.5, "deviation": 0.125}]


def test_figures_csv_has_no_banner(capsys):
    code, out, _ = run(capsys, "figures", "--id", "zero_locus", "--format", "csv")
    assert code == 0 and out.startswith("theta_rad,eps,deviation\n")


def test_tables(capsys):
    code, out, _ = run(capsys, "tables", "--format", "json")
    assert code == 0 and json.loads(out)["all_pass"] is True


@pytest.mark.parametrize("argv", [
    [], ["nope"], ["deviation", "--theta", "1"], ["deviation", "--theta", "abc", "--eps", "0.5"],
    ["kappa", "--range", "0.5"], ["sweep", "--quantities", "bogus"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and "usage" in err


@pytest.mark.parametrize("argv", [
    ["zero-point", "--eps", "0.8"],
    ["deviation", "--theta", "4", "--eps", "0.5"],
    ["classify", "--theta", "1", "--eps", "1"],
    ["kappa", "--range", "0:0.9"],
    ["simulate", "--hadamard", "13", "--theta", "1"],
    ["sweep", "--thetas", "0,5"],
])
def test_domain_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 3 and out == "" and "domain error" in err


def test_verify_failure_exit(capsys, monkeypatch):
    from phaseshift import verify
    monkeypatch.setattr(verify, "_CHECKS", [("analytics", "always fails", lambda: (False, "x"))])
    code, out, _ = run(capsys, "verify")
    assert code == 4 and "FAILED" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "phaseshift", "rho", "--theta", "pi"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "3.0\n"
