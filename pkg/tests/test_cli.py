import csv
import io
import json
import math
import subprocess
import sys

import pytest

from periodkit import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out) if out else None, err


@pytest.fixture
def modes(tmp_path):
    def write(obj, name="ms.json"):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)
    return write


def test_envelope_shape(capsys):
    code, env, _ = run_json(capsys, "bound", "ode", "--L", "1")
    assert code == 0
    assert list(env) == ["command", "inputs", "results", "version"]
    assert env["command"] == "bound" and env["version"] == "0.1.0"
    assert env["inputs"]["L"] == 1.0


def test_bound_ode(capsys):
    _, env, _ = run_json(capsys, "bound", "ode", "--L", "6.283185307")
    assert env["results"]["hilbert"]["lower_bound_T"] == pytest.approx(1.0, abs=1e-9)
    assert env["results"]["banach"]["lower_bound_T"] == pytest.approx(6 / 6.283185307)


def test_bound_parabolic_beta_zero(capsys):
    code, env, _ = run_json(capsys, "bound", "parabolic", "--L", "1", "--beta", "0")
    assert code == 0
    assert env["results"]["bound"]["lower_bound_T"] == pytest.approx(0.25, abs=1e-10)
    assert "rvl" not in env["results"]


def test_bound_parabolic_positive_beta(capsys):
    _, env, _ = run_json(capsys, "bound", "parabolic", "--L", "1", "--beta", "0.5")
    r = env["results"]
    assert r["bound"]["lower_bound_T"] > r["closed_form"]["lower_bound_T"] > r["rvl"]["lower_bound_T"]


def test_bound_hyperbolic(capsys):
    _, env, _ = run_json(capsys, "bound", "hyperbolic", "--L", "1", "--alpha", "2")
    b = env["results"]["bound"]
    assert b["lower_bound_T"] == pytest.approx(0.09781707905873485, rel=1e-14)
    assert b["diagnostics"]["printed_formula_T"] == pytest.approx(0.123305, abs=1e-5)


def test_bound_abstract(capsys):
    code, env, _ = run_json(capsys, "bound", "abstract", "--L", "1", "--T", "0.2", "--mu0", "0", "--M", "1",
                            "--m", "power:1:0")
    assert code == 0
    assert env["results"]["certificate"]["certifies_nonexistence"] is True
    code, env, _ = run_json(capsys, "bound", "abstract", "--L", "1", "--T", "0.05", "--mu0", "2",
                            "--M", str(1 + math.sqrt(2)), "--m", "constant:1", "--k-plus", "corollary",
                            "--k-minus", "corollary")
    assert code == 0
    assert env["results"]["corollary1"]["lower_bound_T"] > 0.05
    assert env["results"]["certificate"]["certifies_nonexistence"] is True


def test_bound_abstract_past_threshold_serializes_inf_as_null(capsys):
    _, env, _ = run_json(capsys, "bound", "abstract", "--L", "1", "--T", "5", "--mu0", "2", "--M", "1",
                         "--m", "constant:1")
    assert env["results"]["certificate"]["rhs_min"] is None


@pytest.mark.parametrize("argv", [
    ("bound", "hyperbolic", "--L", "1"),
    ("bound", "abstract", "--L", "1", "--T", "0.1", "--mu0", "1", "--M", "1", "--m", "bogus:1"),
    ("bound", "abstract", "--L", "1", "--T", "0.1", "--mu0", "1", "--M", "1", "--m", "constant:1",
     "--k-plus", "two"),
    ("compare", "--betas", "0.1:0.5"),
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert "error" in err


def test_argparse_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["bound", "nonsense"])
    assert info.value.code == 2


def test_domain_error_exit_1(capsys):
    code, out, err = run(capsys, "bound", "parabolic", "--L", "-1")
    assert code == 1 and out == ""
    assert "DomainError" in err


def test_spectral_double_root(capsys, modes):
    code, env, _ = run_json(capsys, "spectral", modes({"alpha": 1, "lambdas": [4]}))
    assert code == 0
    m = env["results"]["modes"][0]
    assert m["branch"] == "double_root" and m["double_root"] is True
    assert m["xi_minus"] == {"re": -2.0, "im": 0.0}
    assert m["projection_norm"] is None


def test_spectral_with_mu(capsys, modes):
    code, env, _ = run_json(capsys, "spectral", modes({"alpha": 1, "lambdas": [8]}), "--mu", "3")
    assert code == 0
    r = env["results"]
    assert r["decomposition"]["n_minus"] == [0]
    assert r["projection_bounds"]["holds"] and r["operator_bound"]["holds"]
    assert r["decay_check"] is True


def test_spectral_mu_too_small(capsys, modes):
    code, _, err = run(capsys, "spectral", modes({"alpha": 1, "lambdas": [8]}), "--mu", "1.5")
    assert code == 1
    assert "2/alpha" in err


@pytest.mark.parametrize("content", ["{bad", json.dumps({"alpha": 1}), json.dumps({"alpha": 1, "lambdas": [2, 1]})])
def test_spectral_malformed_file(capsys, modes, content):
    code, _, _ = run(capsys, "spectral", modes(content))
    assert code == 2


def test_spectral_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "spectral", str(tmp_path / "nope.json"))
    assert code == 2


def test_simulate_hyperbolic(capsys, tmp_path):
    traj, rep = tmp_path / "t.csv", tmp_path / "r.json"
    code, env, _ = run_json(capsys, "simulate", "hyperbolic", "--lambda", "4", "--omega", "2", "--alpha", "1",
                            "--trajectory", str(traj), "--report", str(rep))
    assert code == 0
    report = json.loads(rep.read_text())
    assert list(report) == ["period_exact", "observed_period", "lipschitz_exact", "bound", "margin", "pass"]
    assert report["pass"] is True
    assert report == env["results"]["report"]
    header = next(csv.reader(traj.open()))
    assert header == ["t", "u1", "v1", "u2", "v2"]


def test_simulate_parabolic(capsys):
    code, env, _ = run_json(capsys, "simulate", "parabolic", "--lambda", "1", "--omega", "6.283185307179586")
    assert code == 0
    assert env["results"]["report"]["observed_period"] == pytest.approx(1.0, abs=1e-4)


def test_compare_csv(capsys):
    code, out, _ = run(capsys, "compare", "--betas", "0.1:0.9:0.1", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9
    assert [float(r["beta"]) for r in rows] == pytest.approx([0.1 * k for k in range(1, 10)])
    for r in rows:
        assert float(r["K_beta"]) < float(r["rvl_constant"])
        assert r["K_beta_below_rvl"] == "True"


def test_compare_json_includes_beta_zero(capsys):
    _, env, _ = run_json(capsys, "compare", "--betas", "0:0.2:0.1")
    rows = env["results"]["rows"]
    assert len(rows) == 3
    assert rows[0]["K_beta"] == pytest.approx(4.0, abs=1e-9)
    assert rows[0]["rvl_constant"] is None


def test_compare_rejects_beta_one(capsys):
    code, _, _ = run(capsys, "compare", "--betas", "0.5:1.0:0.5")
    assert code == 1


def test_parse_range_inclusive():
    assert cli.parse_range("0.1:0.9:0.1") == pytest.approx([0.1 * k for k in range(1, 10)])
    assert cli.parse_range("0.05:0.95:0.05")[-1] == pytest.approx(0.95)


def test_byte_identical_output(capsys, modes):
    path = modes({"alpha": 0.7, "lambdas": [1, 5, 8.16, 30]})
    outs = [run(capsys, "spectral", path, "--mu", "4")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    outs = [run(capsys, "compare", "--betas", "0.1:0.3:0.1")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_verify_quick(capsys, monkeypatch):
    monkeypatch.setenv("PERIODKIT_SEED", "7")
    code, env, err = run_json(capsys, "verify", "--quick")
    assert code == 0, err
    r = env["results"]
    assert r["all_passed"] and r["failed"] == [] and r["seed"] == 7
    assert {c["name"] for c in r["checks"]} >= {"grid_instantiation", "tamper_negative_control"}


def test_verify_reports_failures(capsys, monkeypatch):
    from periodkit import verify
    monkeypatch.setattr(verify, "CHECKS", verify.CHECKS + (verify.Check("always_fails", lambda r, q: (False, {})),))
    code, env, err = run_json(capsys, "verify", "--quick")
    assert code == 1
    assert env["results"]["failed"] == ["always_fails"]
    assert "FAILED: always_fails" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "periodkit", "bound", "ode", "--L", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["hilbert"]["lower_bound_T"] == pytest.approx(2 * math.pi)


def test_jsonable_handles_numpy_and_nonfinite():
    import numpy as np
    out = cli.jsonable({"a": np.float64(1.5), "b": float("nan"), "c": np.int64(3), "d": [np.inf, 1j]})
    assert out == {"a": 1.5, "b": None, "c": 3, "d": [None, {"re": 0.0, "im": 1.0}]}
