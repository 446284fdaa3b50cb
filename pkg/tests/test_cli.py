import io
import json
import math
import subprocess
import sys

import pytest

from refreshalloc.cli import run


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_solve_json_schema():
    code, out, err = _run(["solve", "--budget", "2.4"])
    assert code == 0
    rep = json.loads(out)
    assert set(rep) == {"plan", "nu", "power", "mse", "psnr_db", "kkt", "meta"}
    assert rep["psnr_db"] == pytest.approx(50.0, abs=0.5)
    assert len(rep["plan"]["intervals"]) == 8
    assert rep["meta"]["parameters"]["budget"] == 2.4
    assert "PSNR" in err


def test_solve_max_power():
    code, out, _ = _run(["solve", "--budget", "125"])
    rep = json.loads(out)
    assert rep["nu"] == 0
    assert rep["plan"]["intervals"] == [0.064] * 8


def test_solve_csv():
    code, out, _ = _run(["solve", "--budget", "10", "--format", "csv"])
    lines = out.splitlines()
    assert code == 0 and lines[0] == "bit,interval_s" and len(lines) == 9


def test_savings_psnr_60():
    code, out, _ = _run(["savings", "--target-psnr", "60"])
    assert code == 0
    assert json.loads(out)["savings"] == pytest.approx(0.38, abs=0.02)


def test_savings_unreachable_is_domain_error():
    code, _, err = _run(["savings", "--target-mse", "1e-9"])
    assert code == 3 and "minimum achievable" in err


def test_solve_then_verify_round_trip(tmp_path):
    path = tmp_path / "r.json"
    assert _run(["solve", "--budget", "7.5", "--output", str(path)])[0] == 0
    code, out, _ = _run(["verify", "--report", str(path)])
    assert code == 0
    assert json.loads(out)["kkt"]["max_residual"] <= 1e-8


def test_verify_uses_report_parameters(tmp_path):
    path = tmp_path / "r.json"
    _run(["solve", "--budget", "3", "--bits", "4", "--beta", "2.5", "--output", str(path)])
    code, out, _ = _run(["verify", "--report", str(path)])
    assert json.loads(out)["kkt"]["max_residual"] <= 1e-8
    # explicit flags override the echoed parameters and expose the mismatch
    code, out, _ = _run(["verify", "--report", str(path), "--beta", "1.0"])
    assert json.loads(out)["kkt"]["max_residual"] > 1e-3


def test_solve_discrete():
    code, out, _ = _run(["solve-discrete", "--budget", "5", "--gamma", "15"])
    rep = json.loads(out)
    assert code == 0 and rep["meta"]["proven_optimal"]
    assert rep["power"] <= 5.0
    assert all(isinstance(z, int) for z in rep["plan"]["z"])


def test_solve_discrete_infeasible():
    code, _, err = _run(["solve-discrete", "--budget", "0.5", "--z-cap", "5"])
    assert code == 3 and "least achievable power" in err


def test_fit(tmp_path):
    p = tmp_path / "m.csv"
    rows = ["interval_s,ber"] + [f"{t},{2e-7 * math.exp(1.9 * t)!r}" for t in (0.5, 1.0, 2.0, 4.0)]
    p.write_text("\n".join(rows) + "\n")
    code, out, _ = _run(["fit", "--measurements", str(p)])
    fit = json.loads(out)
    assert fit["alpha"] == pytest.approx(2e-7, rel=1e-10)
    assert fit["beta"] == pytest.approx(1.9, rel=1e-10)


def test_sweep_csv_and_budget_file(tmp_path):
    bfile = tmp_path / "b.txt"
    bfile.write_text("2\n# comment\n40\n")
    code, out, _ = _run(["sweep", "--budgets", str(bfile), "--gamma", "1", "--gamma", "15", "--format", "csv"])
    lines = out.splitlines()
    assert code == 0 and len(lines) == 3
    assert lines[0].endswith("mse_discrete_g1,mse_discrete_g15")


def test_sweep_range_spec_json():
    code, out, _ = _run(["sweep", "--budgets", "1:125:5"])
    rows = json.loads(out)["rows"]
    assert [r["budget"] for r in rows][0] == pytest.approx(1.0) and len(rows) == 5


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"budget": 125, "bits": 4}))
    code, out, _ = _run(["solve", "--config", str(cfg)])
    assert json.loads(out)["power"] == pytest.approx(4 / 0.064)
    code, out, _ = _run(["solve", "--config", str(cfg), "--budget", "20"])
    assert json.loads(out)["power"] == pytest.approx(20.0)
    cfg.write_text(json.dumps({"budgett": 1}))
    code, _, err = _run(["solve", "--config", str(cfg)])
    assert code == 2 and "budgett" in err


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["solve"], "--budget"),
        (["savings"], "--target-mse"),
        (["sweep", "--budgets", "1:2"], "--budgets"),
        (["fit", "--measurements", "/nonexistent.csv"], "--measurements"),
        (["solve-discrete", "--budget", "5", "--gamma", "1", "--gamma", "2"], "--gamma"),
        (["fit", "--measurements", "x", "--format", "csv"], ""),
    ],
)
def test_usage_errors(argv, needle):
    code, _, err = _run(argv)
    assert code == 2
    assert needle in err


def test_argparse_errors_exit_2():
    assert _run(["solve", "--bogus"])[0] == 2
    assert _run(["nope"])[0] == 2


def test_numeric_error_exit_code(monkeypatch):
    from refreshalloc import continuous
    from refreshalloc.errors import NumericError

    def boom(*a, **k):
        raise NumericError("no convergence")

    monkeypatch.setattr(continuous, "solve", boom)
    assert _run(["solve", "--budget", "3"])[0] == 4


def test_deterministic_output():
    a = _run(["sweep", "--budgets", "1:125:7", "--gamma", "15", "--format", "csv"])[1]
    b = _run(["sweep", "--budgets", "1:125:7", "--gamma", "15", "--format", "csv"])[1]
    assert a == b


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "refreshalloc", "solve", "--budget", "125"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["nu"] == 0
