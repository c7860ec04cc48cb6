import json
import math
import subprocess
import sys

import pytest

from lcineq import bounds, cli

INDICATOR = '{"kind":"Indicator","c":1,"d":2}'
EXPONENTIAL = '{"kind":"PlateauExponential","c":1,"d":0,"rate":1}'


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bound_bk_equality(capsys):
    code, out, _ = run(capsys, "bound", "--theorem", "bk", "--profile", INDICATOR, "--h", "1")
    rep = json.loads(out)
    assert code == 0
    assert rep["satisfied"] and rep["applicable"] and rep["slack"] == 0.0
    assert rep["lhs"] == pytest.approx(8 / 3)


def test_bound_upper_lc_equality(capsys):
    code, out, _ = run(capsys, "bound", "--theorem", "upper-lc", "--profile", EXPONENTIAL,
                       "--h", "1")
    rep = json.loads(out)
    assert code == 0 and rep["lhs"] == pytest.approx(rep["rhs"], rel=1e-9)


def test_bound_nested_params_and_file(capsys, tmp_path):
    path = tmp_path / "f.json"
    path.write_text('{"kind": "Indicator", "params": {"c": 1, "d": 2}}')
    code, out, _ = run(capsys, "bound", "--theorem", "weighted", "--profile", f"@{path}",
                       "--h", "1", "--N", "t^2", "--measure", "0,0")
    assert code == 0 and json.loads(out)["satisfied"]


def test_bound_not_applicable_exits_zero(capsys):
    code, out, _ = run(capsys, "bound", "--theorem", "bk", "--profile", INDICATOR, "--h", "1.9")
    rep = json.loads(out)
    assert code == 0 and rep["applicable"] is False


def test_bound_violation_exits_one(capsys, monkeypatch):
    bad = bounds.make_report("bk", 1.0, 2.0, 0.5, 0.75, "lower")
    monkeypatch.setattr(bounds, "check_bk", lambda f, h, q: bad)
    code, out, _ = run(capsys, "bound", "--theorem", "bk", "--profile", INDICATOR, "--h", "1")
    assert code == 1 and json.loads(out)["satisfied"] is False


@pytest.mark.parametrize("argv", [
    ["bound", "--theorem", "bk", "--profile", "{bad", "--h", "1"],
    ["bound", "--theorem", "bk", "--profile", '{"kind":"Nope"}', "--h", "1"],
    ["bound", "--theorem", "bk", "--profile", INDICATOR],
    ["bound", "--theorem", "upper-sc", "--profile", INDICATOR, "--h", "1", "--s", "0"],
    ["bound", "--theorem", "weighted", "--profile", INDICATOR, "--h", "1", "--measure", "x"],
    ["verify", "--trials", "0"],
    ["threshold", "--delta-s", "0"],
    ["threshold", "--theta-p", "1"],
    ["threshold"],
    ["sweep", "--objective", "upper-lc"],
    ["sweep", "--objective", "upper-lc", "--delta", "0.3", "--steps", "1"],
    ["geometry", "--mode", "floating", "--n", "2"],
    ["geometry", "--n", "1", "--h", "0.1"],
    ["prob", "--laplace", "--profile", "uniform"],
    ["prob", "--median", "--profile", "uniform", "--scale", "800", "--N", "cosh"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["bound", "--theorem", "nope"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--trials", "100", "--seed", "42")
    d = json.loads(out)
    assert code == 0 and d["passed"] and d["violations"] == 0 and d["checked"] > 0
    assert [s["family"] for s in d["suites"]] == ["logconcave", "sconcave"]
    code, out, _ = run(capsys, "verify", "--family", "sconcave", "--s", "1", "--trials", "50")
    assert code == 0 and json.loads(out)["passed"]


def test_verify_deterministic(capsys):
    argv = ("verify", "--family", "all", "--trials", "40", "--seed", "3")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_threshold(capsys):
    code, out, _ = run(capsys, "threshold", "--theta-p", "2", "--delta-s", "1", "--delta-n", "3")
    d = json.loads(out)
    assert code == 0
    assert d["delta_s"]["value"] == 0.75
    assert d["theta_p"]["value"] == pytest.approx(0.79681213002, abs=1e-9)
    assert d["delta_n"]["value"] == pytest.approx(d["delta_n"]["closed_form"], rel=1e-12)


def test_sweep_csv_and_summary(capsys):
    code, out, err = run(capsys, "sweep", "--objective", "upper-lc", "--delta", "0.177",
                         "--xmax", "10", "--steps", "4096")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "x,value" and len(lines) == 4097
    summary = json.loads(err)
    assert summary["monotone"] is True and summary["argmax"] == 0.0


def test_sweep_json_and_non_monotone(capsys):
    code, out, _ = run(capsys, "sweep", "--objective", "upper-sc", "--delta", "0.25", "--s", "1",
                       "--steps", "64", "--format", "json")
    d = json.loads(out)
    assert code == 0 and len(d["x"]) == 64 and d["summary"]["monotone"]
    # below the admissible ratio the objective is no longer maximized at zero
    code, out, _ = run(capsys, "sweep", "--objective", "upper-lc", "--delta", "0.05",
                       "--steps", "256", "--format", "json")
    assert code == 1 and json.loads(out)["summary"]["monotone"] is False


def test_sweep_K_u(capsys):
    code, out, _ = run(capsys, "sweep", "--objective", "K_u", "--N", "t^2", "--measure", "0,1",
                       "--u", "0.5", "--V", "1", "--h", "0.3", "--steps", "128",
                       "--format", "json")
    assert code == 0 and json.loads(out)["summary"]["monotone"]


def test_geometry_modes(capsys):
    code, out, _ = run(capsys, "geometry", "--body", "cube_axis", "--n", "3", "--h", "0.25")
    d = json.loads(out)
    assert code == 0 and set(d) == {"body", "n", "h", "slab", "moment", "bounds"}
    assert d["bounds"]["lower"]["rhs"] == pytest.approx(1 / 12, rel=1e-9)
    code, out, _ = run(capsys, "geometry", "--mode", "isotropic", "--n", "3", "--h", "0.25")
    d = json.loads(out)
    assert code == 0 and d["L_lower"] == pytest.approx(1 / math.sqrt(12), rel=1e-9)
    code, out, _ = run(capsys, "geometry", "--mode", "floating", "--n", "2",
                       "--L", str(1 / math.sqrt(12)), "--delta", "0.3")
    assert code == 0 and json.loads(out)["r_outer"] == pytest.approx(0.2, rel=1e-9)
    code, out, _ = run(capsys, "geometry", "--mode", "diagonal", "--n", "2",
                       "--samples", "2000", "--seed", "1")
    assert code == 0 and json.loads(out)["samples"] == 2000


def test_prob_modes(capsys):
    code, out, _ = run(capsys, "prob", "--laplace", "--profile", "uniform", "--s", "1.0")
    d = json.loads(out)
    assert code == 0 and d["lhs"] == pytest.approx(d["rhs"], rel=1e-9)
    code, out, _ = run(capsys, "prob", "--median", "--profile", "laplace")
    d = json.loads(out)
    assert code == 0 and d["median"] == pytest.approx(math.log(2), rel=1e-9)
    code, out, _ = run(capsys, "prob", "--jensen", "--profile", "exponential",
                       "--h", str(math.log(2)))
    assert code == 0 and json.loads(out)["satisfied"]
    code, out, _ = run(capsys, "prob", "--anticoncentration", "--profile", "laplace", "--h", "1")
    assert code == 0 and json.loads(out)["satisfied"]


def test_output_file(capsys, tmp_path):
    path = tmp_path / "out.json"
    code, out, _ = run(capsys, "threshold", "--delta-s", "1", "--output", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["delta_s"]["value"] == 0.75


def test_config_env_and_flag(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trials": 7, "seed": 11}))
    monkeypatch.setenv(cli.CONFIG_ENV, str(cfg))
    _, out, _ = run(capsys, "verify", "--family", "logconcave")
    d = json.loads(out)
    assert d["suites"][0]["trials"] == 7 and d["suites"][0]["seed"] == 11
    # command-line values override the file
    _, out, _ = run(capsys, "verify", "--family", "logconcave", "--trials", "5")
    assert json.loads(out)["suites"][0]["trials"] == 5
    monkeypatch.delenv(cli.CONFIG_ENV)
    other = tmp_path / "other.json"
    other.write_text(json.dumps({"trials": 3}))
    _, out, _ = run(capsys, "verify", "--family", "sconcave", "--config", str(other))
    assert json.loads(out)["suites"][0]["trials"] == 3


@pytest.mark.parametrize("content", ["{not json", "[1, 2]", '{"quadrature": {"rel_tol": -1}}'])
def test_bad_config_exits_two(capsys, tmp_path, content):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(content)
    code, out, err = run(capsys, "threshold", "--delta-s", "1", "--config", str(cfg))
    assert code == 2 and out == "" and "config" in err


def test_fmt_digits_and_nonfinite():
    assert cli.fmt(math.pi) == 3.14159265359
    assert cli.fmt({"a": [math.inf, -math.inf, math.nan]}) == {"a": ["inf", "-inf", "nan"]}
    assert cli.dumps({"b": 1, "a": True}) == '{"a": true, "b": 1}'


def test_console_script_byte_identical():
    argv = [sys.executable, "-m", "lcineq.cli", "verify", "--trials", "30", "--seed", "42"]
    a = subprocess.run(argv, capture_output=True, check=True)
    b = subprocess.run(argv, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout
