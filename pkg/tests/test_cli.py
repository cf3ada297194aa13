import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from logmaj.cli import main
from logmaj.ensembles import commuting_family, random_hermitian, random_pd
from logmaj.io import dumps, read_matrix, write_matrices
from logmaj.suites import SUITES, RunConfig, run_suite


@pytest.fixture
def files(tmp_path):
    rng = np.random.default_rng(11)
    paths = {}

    def put(name, mats):
        p = tmp_path / f"{name}.json"
        write_matrices(p, mats)
        paths[name] = str(p)

    put("A", [random_pd(rng, 3)])
    put("B", [random_pd(rng, 3)])
    put("fam", commuting_family(rng, 3, 4))
    put("H", [random_hermitian(rng, 3) for _ in range(3)])
    put("three", [random_pd(rng, 3) for _ in range(3)])
    put("rho", [np.diag([0.5, 0.5])])
    put("sigma", [np.diag([0.25, 0.75])])
    put("P1", [np.diag([2.0, 0.0])])
    put("P2", [np.diag([3.0, 0.0])])
    paths["dir"] = tmp_path
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_majorize_vectors(capsys):
    code, out, _ = run(capsys, "majorize", "2,2", "4,1", "--kind", "log")
    rep = json.loads(out)["report"]
    assert code == 0 and rep["holds"] and rep["kind"] == "log"
    code, out, _ = run(capsys, "majorize", "2,0", "1,1", "--kind", "weak")
    assert not json.loads(out)["report"]["holds"]


def test_majorize_matrix_spectra(capsys, files):
    code, out, _ = run(capsys, "majorize", files["A"], files["A"], "--matrices", "--values", "sv")
    assert code == 0 and json.loads(out)["report"]["holds"]


def test_araki_and_extended(capsys, files):
    code, out, _ = run(capsys, "araki", files["A"], files["B"], "--p", "0.25")
    assert code == 0 and json.loads(out)["report"]["holds"]
    code, out, _ = run(capsys, "araki-ext", files["fam"], "--theta", "0.3", "--convention", "support",
                       "--r", "2", "--norm", "schatten:3")
    d = json.loads(out)
    assert d["eigenvalues"]["report"]["holds"] and d["singular_values"]["report"]["holds"]
    assert d["norm_inequality"]["holds"]


def test_araki_wrong_count_is_usage_error(capsys, files):
    code, _, err = run(capsys, "araki", files["A"])
    assert code == 2 and "needs 2 matrices" in err


def test_mean_kinds(capsys, files):
    out_path = files["dir"] / "mean.json"
    code, out, _ = run(capsys, "mean", files["three"], "--kind", "karcher", "--weights", "[0.2,0.3,0.5]",
                       "--out", out_path)
    rec = json.loads(out)
    assert code == 0 and rec["residual"] <= 1e-12 and rec["iterations"] >= 1
    assert read_matrix(out_path).shape == (3, 3)
    code, out, _ = run(capsys, "mean", files["A"], files["B"], "--kind", "geo2", "--alpha", "0.5")
    assert code == 0 and json.loads(out)["mean"]["dim"] == 3
    assert run(capsys, "mean", files["three"], "--kind", "power")[0] == 2
    assert run(capsys, "mean", files["three"], "--kind", "le")[0] == 0


def test_divergence_value(capsys, files):
    code, out, _ = run(capsys, "divergence", files["rho"], files["sigma"], "--alpha", "2", "--z", "1")
    d = json.loads(out)
    assert code == 0 and d["Q"]["value"] == pytest.approx(4 / 3) and d["D"]["value"] == pytest.approx(math.log(4 / 3))


def test_divergence_scan_csv(capsys, files):
    code, out, err = run(capsys, "divergence", files["A"], files["B"], "--scan", "alpha", "--z", "2",
                         "--grid", "0:3:41", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["alpha", "z", "value", "finite"] and len(rows) == 42
    assert json.loads(err)["verdict"] is True
    code, out, _ = run(capsys, "divergence", files["A"], files["B"], "--scan", "line", "--kappa", "1",
                       "--z0", "0.5")
    assert json.loads(out)["verdict"] is True
    assert run(capsys, "divergence", files["A"], files["B"], "--scan", "z")[0] == 2


def test_gt_example_flag(capsys):
    code, out, _ = run(capsys, "gt", "--example41", "--r", "2", "--eps", "1e-8")
    d = json.loads(out)
    assert code == 0 and abs(d["relative_gap"]) <= 1e-6 and d["holds"]
    assert all(v > 0 for v in d["commutators"].values())
    code, out, err = run(capsys, "gt", "--example41", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t", "weight", "integrand"] and len(rows) == json.loads(err)["nodes"] + 1


def test_gt_files_and_theta(capsys, files):
    code, out, _ = run(capsys, "gt", files["H"], "--r", "1")
    assert code == 0 and json.loads(out)["holds"]
    code, out, _ = run(capsys, "gt", files["H"], "--theta", "0.5")
    assert code == 0 and json.loads(out)["report"]["holds"]
    assert run(capsys, "gt")[0] == 2


def test_taylor_eqcase_ltk(capsys, files):
    code, out, _ = run(capsys, "taylor", files["H"], "--order", "4")
    d = json.loads(out)
    assert code == 0 and d["closed_form_deviation"] < 1e-10 and len(d["trace_defects"]) == 4
    code, out, _ = run(capsys, "eqcase", files["fam"], "--norm", "frobenius", "--t", "1")
    d = json.loads(out)
    assert code == 0 and d["a"] and d["consistent"]
    code, out, _ = run(capsys, "ltk", files["P1"], files["P2"], "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["t", "error"] and max(float(r[1]) for r in rows[1:]) < 1e-12


def test_eqcase_bad_norm_is_error(capsys, files):
    code, _, err = run(capsys, "eqcase", files["fam"], "--norm", "operator")
    assert code == 1 and "PreconditionError" in err


def test_tol_override_validation(capsys):
    assert run(capsys, "run", "ltk", "--tol", "nope=1")[0] == 2
    assert run(capsys, "run", "ltk", "--tol", "eq_tol=-1")[0] == 2
    assert run(capsys, "run", "ltk", "--tol", "eq_tol")[0] == 2


def test_unknown_suite_exit_2(capsys):
    code, _, err = run(capsys, "run", "bogus")
    assert code == 2 and "unknown suite" in err


def test_run_writes_reports(capsys, tmp_path):
    code, out, _ = run(capsys, "run", "ltk", "--out", tmp_path, "--seed", "7")
    summary = json.loads((tmp_path / "ltk.summary.json").read_text())
    assert code == 0 and summary == json.loads(out)
    assert set(summary) >= {"suite", "cases", "failures", "worst_margin", "seed"}
    assert summary["seed"] == 7 and summary["failures"] == 0
    lines = (tmp_path / "ltk.jsonl").read_text().splitlines()
    assert len(lines) == summary["cases"] and json.loads(lines[0])["case"] == 0


def test_run_exit_1_on_failures(capsys, tmp_path):
    # an absurdly tight tolerance makes checks fail without touching the code
    code, out, _ = run(capsys, "run", "taylor", "--out", tmp_path, "--tol", "taylor_tol=1e-30")
    assert code == 1 and json.loads(out)["failures"] > 0


def test_threads_do_not_change_reports(monkeypatch):
    cases = dict.fromkeys(SUITES, 6)
    serial = run_suite("araki", RunConfig(cases=cases))
    monkeypatch.setenv("LOGMAJ_THREADS", "3")
    cfg = RunConfig.from_env()
    assert cfg.threads == 3
    cfg.cases = cases
    threaded = run_suite("araki", cfg)
    assert dumps(serial.records) == dumps(threaded.records)


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "logmaj.cli", "run", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
