from __future__ import annotations

import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from kfgring import cli
from kfgring.cli import main, parse_range, read_spectrum_csv

GENERAL = ["--M", "1", "--V0", "0.1", "--S0", "0.25", "--delta", "0.1"]


@pytest.fixture
def spec_file(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"M": 1, "V0": 0.3, "S0": 0.3, "delta": 0.1, "beta": 0.05, "beta_prime": 0.1}))
    return str(path)


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.setenv("KFG_THREADS", "1")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_range():
    assert list(parse_range("0..2")) == [0, 1, 2]
    assert list(parse_range("3")) == [3]


def test_spectrum_cartesian_rows(capsys, spec_file):
    code, out, _ = run(capsys, "spectrum", "--spec", spec_file, "--case", "V=S", "--nr", "0..2", "--N", "0..2", "--m", "0")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 9
    assert {(int(r["n_r"]), int(r["N"])) for r in rows} == {(a, b) for a in range(3) for b in range(3)}
    assert all(r["case"] == "VeqS" and r["route"] == "NU" for r in rows)


def test_flags_override_spec_file(capsys, spec_file, tmp_path):
    code, flagged, _ = run(capsys, "spectrum", "--spec", spec_file, "--C0", "0", "--nr", "0..1", "--N", "0..1")
    assert code == 0
    data = json.loads(open(spec_file).read())
    data["C0"] = 0.0
    other = tmp_path / "c0.json"
    other.write_text(json.dumps(data))
    code, direct, _ = run(capsys, "spectrum", "--spec", str(other), "--nr", "0..1", "--N", "0..1")
    assert flagged == direct
    _, improved, _ = run(capsys, "spectrum", "--spec", spec_file, "--nr", "0..1", "--N", "0..1")
    assert improved != flagged


def test_empty_spectrum_is_header_only(capsys):
    code, out, _ = run(capsys, "spectrum", "--nr", "0..1")
    assert code == 0
    assert out.strip() == "n_r,N,m,case,route,E,lambda,residual,bound_flag,error"


def test_csv_round_trip_matches_jsonl(capsys):
    args = ["spectrum", *GENERAL, "--beta", "0.1", "--beta-prime", "0.2", "--nr", "0..1", "--N", "0..1", "--m", "1",
            "--branch", "all"]
    _, text, _ = run(capsys, *args)
    _, jl, _ = run(capsys, *args, "--format", "jsonl")
    levels = read_spectrum_csv(text)
    records = [json.loads(line) for line in jl.splitlines()]
    assert len(levels) == len(records) == 8
    for lv, rec in zip(levels, records):
        assert lv.E == rec["E"]
        assert lv.lam == rec["lambda"]
        assert lv.residual == rec["residual"]
        assert lv.to_dict()["E"] == rec["E"]


def test_routes_agree(capsys):
    args = ["spectrum", *GENERAL, "--beta", "0.1", "--beta-prime", "0.2", "--nr", "0..1", "--N", "1", "--m", "1"]
    energies = {}
    for route in ("NU", "SUSY", "oracle"):
        _, out, _ = run(capsys, *args, "--route", route)
        energies[route] = [float(r["E"]) for r in rows_of(out)]
        assert all(r["route"] == route for r in rows_of(out))
    assert np.allclose(energies["NU"], energies["SUSY"], atol=1e-11, rtol=0)
    assert np.allclose(energies["NU"], energies["oracle"], atol=1e-6, rtol=0)


def test_exact_centrifugal_route(capsys):
    _, approx, _ = run(capsys, "spectrum", *GENERAL, "--N", "1")
    _, exact, _ = run(capsys, "spectrum", *GENERAL, "--N", "1", "--use-exact-centrifugal")
    a, b = rows_of(approx)[0], rows_of(exact)[0]
    assert b["route"] == "oracle"
    assert 0 < abs(float(a["E"]) - float(b["E"])) < 1e-4


def test_infeasible_rows_are_errors(capsys):
    code, out, err = run(capsys, "spectrum", *GENERAL, "--beta", "2", "--nr", "0", "--m", "0")
    assert code == 1
    rows = rows_of(out)
    assert rows[0]["bound_flag"] == "error" and "InfeasibleRing" in rows[0]["error"]
    assert "InfeasibleRing" in err


def test_partial_failure_exits_zero(capsys):
    code, out, _ = run(capsys, "spectrum", *GENERAL, "--beta", "0.3", "--m", "0..1")
    rows = rows_of(out)
    assert code == 0
    assert [r["bound_flag"] for r in rows] == ["error", "bound"]


@pytest.mark.parametrize(
    "argv",
    [["spectrum", "--nr", "x"], ["spectrum", "--case", "V>S"], ["bogus"], ["spectrum", "--delta", "-1"],
     ["spectrum", "--tol", "0"], ["spectrum", "--spec", "/nonexistent.json"]],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_wavefunction_norm_and_overlay(capsys, tmp_path):
    out_file = tmp_path / "wf.csv"
    code, _, _ = run(capsys, "wavefunction", *GENERAL, "--N", "1", "--check-norm", "--overlay-susy",
                     "--points", "50", "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[-1].startswith("# norm,")
    assert abs(float(lines[-1].split(",")[1]) - 1.0) < 1e-8
    rows = rows_of("\n".join(lines[:-1]))
    ratio = np.array([float(r["ratio"]) for r in rows])
    assert np.std(ratio) / np.mean(ratio) < 1e-9


def test_wavefunction_theta_legendre(capsys):
    code, out, _ = run(capsys, "wavefunction", *GENERAL, "--grid", "theta", "--N", "1", "--points", "40", "--check-norm")
    assert code == 0
    lines = out.splitlines()
    rows = rows_of("\n".join(lines[:-1]))
    theta = np.array([float(r["theta"]) for r in rows])
    vals = np.array([float(r["Theta"]) for r in rows])
    assert np.allclose(vals, math.sqrt(1.5) * np.cos(theta), atol=1e-12)
    assert abs(float(lines[-1].split(",")[1]) - 1.0) < 1e-8


def test_wavefunction_unknown_level(capsys):
    code, _, err = run(capsys, "wavefunction", "--nr", "0")
    assert code == 1
    assert "NoBoundState" in err


def test_wavefunction_jsonl_norm(capsys):
    code, out, _ = run(capsys, "wavefunction", *GENERAL, "--points", "3", "--check-norm", "--format", "jsonl")
    lines = [json.loads(x) for x in out.splitlines()]
    assert code == 0 and len(lines) == 4 and "norm" in lines[-1]


def test_verify_passes_with_delta_scan(capsys):
    code, out, _ = run(capsys, "verify", *GENERAL, "--beta", "0.1", "--beta-prime", "0.2", "--nr", "0..1", "--N", "0..1",
                       "--delta-scan", "0.2,0.1,0.05")
    assert code == 0
    assert "delta_scan_monotone: True" in out
    assert out.strip().endswith("PASS")


def test_verify_degenerate(capsys):
    code, out, _ = run(capsys, "verify", "--V0", "0", "--S0", "0")
    assert code == 0
    assert "no bound states" in out


def test_verify_jsonl_report(capsys):
    code, out, _ = run(capsys, "verify", *GENERAL, "--nr", "0", "--N", "0", "--format", "jsonl")
    report = json.loads(out)
    assert code == 0 and report["pass"] and report["failures"] == []
    assert report["max_nu_susy"] < 1e-11


def test_verify_threshold_breach(capsys, monkeypatch):
    monkeypatch.setitem(cli.THRESHOLDS, "nu_oracle", 0.0)
    code, out, _ = run(capsys, "verify", *GENERAL, "--nr", "0", "--N", "0")
    assert code == 1
    assert "FAIL {" in out and "nu_oracle" in out


def test_console_script_exit_codes():
    ok = subprocess.run([sys.executable, "-m", "kfgring", "verify", "--V0", "0"], capture_output=True, text=True)
    assert ok.returncode == 0
    bad = subprocess.run([sys.executable, "-m", "kfgring", "spectrum", "--nr", "2..1"], capture_output=True, text=True)
    assert bad.returncode == 2
