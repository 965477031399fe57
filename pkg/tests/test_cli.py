import json

import mpmath
import pytest

from painleve_hh.cli import main, parse_scalar
from painleve_hh.errors import ContractViolation


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_scalar_literals():
    assert parse_scalar("-16/5").fraction().denominator == 5
    assert parse_scalar("7").is_exact
    assert not parse_scalar("0.25").is_exact
    assert not parse_scalar("1e-20").is_exact
    with pytest.raises(ContractViolation):
        parse_scalar("sqrt(2)")


def test_analyze_three_parameter_case(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--C", "-16/5",
                           "--lambda", "1/9")
    assert code == 0
    report = json.loads(out)
    assert report["classification"]["label"] == "three-parameter-candidate"
    case2 = [b for b in report["classification"]["balances"]
             if b["balance"]["case"] == "Case2"
             and b["balance"]["alpha"] == {"num": "-3", "den": "2"}]
    assert len(case2) == 1
    values = case2[0]["resonances"]["values"]
    nums = sorted(int(v["num"]) for v in values)
    assert nums == [-1, 0, 4, 6]
    assert all(v["den"] == "1" for v in values)


def test_analyze_integrable_case(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--C", "-6", "--lambda", "2")
    assert code == 0
    assert json.loads(out)["classification"]["label"] == "integrable-candidate"


def test_analyze_candidates_block(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--C", "-1", "--candidates")
    assert code == 0
    cands = json.loads(out)["candidate_C_values"]
    assert len(cands) == 6


def test_analyze_invalid_C(capsys):
    code, _, err = run_cli(capsys, "analyze", "--C", "0")
    assert code == 2
    assert "C = 0" in err


def test_series_c165(capsys):
    code, out, _ = run_cli(capsys, "series", "--case", "C165",
                           "--lambda", "1/9", "--branch", "plus", "--N", "30")
    assert code == 0
    report = json.loads(out)
    resid = report["residual_max"]
    assert mpmath.mpf(resid["re"]) <= mpmath.mpf("1e-25")
    assert report["solution"]["N"] == 30
    assert report["solution"]["step"] == "1/2"


def test_series_zero_branch_default_lambda(capsys):
    # the default lambda = 1 (classical system) admits the f_{-1} = 0 branch
    code, out, _ = run_cli(capsys, "series", "--case", "C43",
                           "--branch", "zero", "--N", "30")
    assert code == 0
    report = json.loads(out)
    assert report["f_minus_1"] == {"num": "0", "den": "1"}


def test_series_zero_branch_generic_lambda_exit_code(capsys):
    code, _, err = run_cli(capsys, "series", "--case", "C43",
                           "--branch", "zero", "--lambda", "1/9", "--N", "10")
    assert code == 3
    assert "k=2" in err


def test_series_N_too_small(capsys):
    code, _, _ = run_cli(capsys, "series", "--case", "C165", "--N", "3")
    assert code == 2


def test_certify_command(capsys, tmp_path):
    out_file = tmp_path / "cert.json"
    code, _, _ = run_cli(capsys, "--output", str(out_file), "certify",
                         "--case", "C165", "--lambda", "1/9",
                         "--branch", "plus", "--N", "40",
                         "--epsilon", "1/10")
    assert code == 0
    cert = json.loads(out_file.read_text())["certificate"]
    assert cert["verdict"] == "certified"
    assert cert["M"] == {"num": "2", "den": "1"}


def test_fit_command_on_fixture(capsys, tmp_path):
    fixture = {
        "step": "1", "lead": "-2", "complete": True,
        "center": {"num": "0", "den": "1"},
        "coeffs": [{"num": "1", "den": "1"}],
    }
    path = tmp_path / "series.json"
    path.write_text(json.dumps(fixture))
    code, out, _ = run_cli(capsys, "fit", "--series", str(path),
                           "--m", "2", "--match-order", "10")
    assert code == 0
    report = json.loads(out)["fit"]
    assert report["nullspace_dim"] == 1
    h = report["basis"][0]["h"]
    keys = set(h)
    assert keys == {"3,0", "0,2"}


def test_fit_command_on_series_report(capsys, tmp_path):
    path = tmp_path / "sol.json"
    code, _, _ = run_cli(capsys, "--output", str(path), "series",
                         "--case", "C43", "--lambda", "1/9",
                         "--branch", "plus", "--N", "30")
    assert code == 0
    code, out, _ = run_cli(capsys, "fit", "--series", str(path),
                           "--m", "2", "--match-order", "20")
    assert code == 0
    json.loads(out)


def test_verify_command(capsys):
    code, out, _ = run_cli(capsys, "verify", "--case", "C165",
                           "--lambda", "1/9", "--branch", "plus",
                           "--N", "60", "--tol", "1e-20")
    assert code == 0
    report = json.loads(out)
    diff = mpmath.mpf(report["numeric_cross_check"]["max_component_diff"]["re"])
    assert diff <= mpmath.mpf("1e-15")
    assert mpmath.mpf(report["energy_nonconstant_max"]["re"]) \
        <= mpmath.mpf("1e-25")


def test_sweep_detects_merge(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--case", "C43",
                           "--lambda-grid", "1/2:3/2:1/2")
    assert code == 0
    rows = json.loads(out)["sweep"]
    assert len(rows) == 3
    by_lambda = {r["lambda"]["num"] + "/" + r["lambda"]["den"]: r for r in rows}
    assert by_lambda["1/1"]["merge_detected"] is True
    assert by_lambda["1/1"]["distinct_branches"] == 3
    assert by_lambda["3/2"]["merge_detected"] is False
    assert by_lambda["3/2"]["nominal_branches"] == 5
    # lam = 1/2 is the other merge point (minus root collapses onto zero)
    assert by_lambda["1/2"]["merge_detected"] is True


def test_reports_carry_provenance(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--C", "-2")
    assert code == 0
    prov = json.loads(out)["provenance"]
    assert prov["tool"] == "painleve-hh"
    assert prov["precision_bits"] >= 64
    assert "config" in prov


def test_roundtrip_residual_within_factor_two(capsys, tmp_path):
    path = tmp_path / "sol.json"
    code, _, _ = run_cli(capsys, "--output", str(path), "series",
                         "--case", "C165", "--lambda", "1/9",
                         "--branch", "plus", "--N", "25")
    assert code == 0
    payload = json.loads(path.read_text())
    recorded = mpmath.mpf(payload["residual_max"]["re"])

    from painleve_hh.jsonio import decode_solution
    from painleve_hh.model import residual_of_series
    sol = decode_solution(payload["solution"])
    rx, ry = residual_of_series(sol.system(), sol.x, sol.y)
    recomputed = max(c.mag() for c in list(rx.coeffs) + list(ry.coeffs))
    assert recomputed <= 2 * max(recorded, mpmath.mpf("1e-77")) \
        or recomputed <= mpmath.mpf("1e-60")


def test_determinism(capsys):
    code1, out1, _ = run_cli(capsys, "series", "--case", "C43",
                             "--lambda", "1/3", "--branch", "minus", "--N", "12")
    code2, out2, _ = run_cli(capsys, "series", "--case", "C43",
                             "--lambda", "1/3", "--branch", "minus", "--N", "12")
    assert code1 == code2 == 0
    assert out1 == out2


def test_precision_override(capsys):
    code, out, _ = run_cli(capsys, "--precision-bits", "320", "series",
                           "--case", "C165", "--lambda", "1/9",
                           "--branch", "plus", "--N", "10")
    assert code == 0
    assert json.loads(out)["provenance"]["precision_bits"] == 320


def test_precision_floor_rejected(capsys):
    with pytest.raises(SystemExit) as err:
        run_cli(capsys, "--precision-bits", "32", "analyze", "--C", "-1")
    assert err.value.code == 2


def test_certification_failure_exit_code(capsys):
    # an M-search limit below the coefficient floor cannot certify
    code, out, _ = run_cli(capsys, "certify", "--case", "C165",
                           "--lambda", "1/9", "--branch", "plus",
                           "--N", "40", "--m-limit", "1")
    assert code == 4
    assert json.loads(out)["certificate"]["verdict"] == "not-certified"


def test_environment_precision_variable():
    import os
    import subprocess
    import sys as _sys
    env = dict(os.environ, PAINLEVE_PRECISION_BITS="192")
    out = subprocess.run(
        [_sys.executable, "-m", "painleve_hh.cli", "analyze", "--C", "-2"],
        capture_output=True, text=True, env=env, check=True)
    assert json.loads(out.stdout)["provenance"]["precision_bits"] == 192
