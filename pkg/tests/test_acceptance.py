"""Acceptance criteria, one marker per criterion.

Suites run once per module with the default configuration; the tests then
read the per-case records so each stated parameter range and tolerance is
checked directly, not only through the suite's own pass/fail bit.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from logmaj.ensembles import case_rng, random_hermitian, random_weights
from logmaj.expansion import taylor_recursion
from logmaj.golden_thompson import block_equality_triple, build_quadrature, gt_check
from logmaj.suites import SUITES, RunConfig, run_suite

_CACHE = {}


def suite(name):
    if name not in _CACHE:
        t0 = time.perf_counter()
        res = run_suite(name, RunConfig())
        _CACHE[name] = (res, time.perf_counter() - t0)
    return _CACHE[name]


def failed(res):
    return {r["case"]: r.get("error") or [k for k, v in r["checks"].items() if not v]
            for r in res.records if not r["ok"]}


def all_checks(res, key):
    return [r["checks"][key] for r in res.records if key in r.get("checks", {})]


# -- 1 ---------------------------------------------------------------------------

@pytest.mark.acceptance(1)
def test_araki_suite():
    res, secs = suite("araki")
    assert res.summary["cases"] == 1000 and not failed(res)
    assert res.summary["worst_margin"] >= -1e-9
    assert max(abs(r["values"]["det_gap"]) for r in res.records) <= 1e-8
    assert {r["values"]["m"] for r in res.records} == {2, 3, 4, 5, 6}
    assert {r["values"]["p"] for r in res.records} == {0.25, 0.5, 0.75}
    # rank-deficient A and B both appear
    assert {r["values"]["variant"] for r in res.records} >= {0, 1, 2}
    assert secs < 30


# -- 2 ---------------------------------------------------------------------------

@pytest.mark.acceptance(2)
def test_extended_araki_suite():
    res, _ = suite("extended")
    assert res.summary["cases"] == 500 and not failed(res)
    vals = [r["values"] for r in res.records]
    assert {v["theta"] for v in vals} == {0.0, 0.3, 0.7, 1.0}
    assert {v["convention"] for v in vals} == {"identity", "support"}
    for v in vals:
        assert v["norm_lhs"] <= v["norm_rhs"] * (1 + 1e-9)
    # reduction error is judged relative to max(1, largest value)
    red = all_checks(res, "araki_reduction")
    assert len(red) == 375 and all(red)


# -- 3 ---------------------------------------------------------------------------

@pytest.mark.acceptance(3)
def test_divergence_suite():
    res, _ = suite("divergence")
    assert res.summary["cases"] == 200 and not failed(res)
    for z in ("0.5", "1", "2"):
        assert len(all_checks(res, f"alpha_monotone_z{z}")) == 200
    assert res.summary["worst_margin"] >= -1e-8
    assert len(all_checks(res, "log_convexity")) == 200
    assert max(r["values"]["scalar_error"] for r in res.records) <= 1e-10
    assert all(all_checks(res, "z_monotone_alpha0.5_increasing"))
    assert all(all_checks(res, "z_monotone_alpha2_decreasing"))


# -- 4 ---------------------------------------------------------------------------

@pytest.mark.acceptance(4)
def test_golden_thompson_suite():
    res, secs = suite("gt")
    assert not failed(res)
    rand = [r["values"] for r in res.records if not r["values"].get("example")]
    assert len(rand) == 200 and {v["r"] for v in rand} == {1.0, 2.0}
    assert min(v["gap"] for v in rand) >= -1e-8
    ex = [r["values"] for r in res.records if r["values"].get("example")]
    assert sorted(v["r"] for v in ex) == [0.5, 1.0, 2.0, 3.0]
    assert max(abs(v["relative_gap"]) for v in ex) <= 1e-6
    assert all(1 - 2e-8 <= v["mass"] <= 1 + 2e-8 for v in ex)
    assert secs < 60


@pytest.mark.acceptance(4)
def test_golden_thompson_block_example_direct():
    eps = 1e-8
    quad = build_quadrature(0.0, eps)
    assert 1 - 2 * eps <= quad.mass <= 1 + 2 * eps
    tri = block_equality_triple(np.diag([1.0, 0.0]), np.array([[0.0, 1.0], [1.0, 0.0]]))
    Hs = [tri.H1, tri.H2, tri.H3]
    closed = (math.e + 1 / math.e) + (math.e + 1)
    assert abs(gt_check(Hs, 1.0, quad).lhs - closed) <= 1e-10
    for r in (0.5, 1.0, 2.0, 3.0):
        rep = gt_check(Hs, r, quad)
        assert abs(rep.gap) / rep.lhs <= 1e-6


# -- 5 ---------------------------------------------------------------------------

@pytest.mark.acceptance(5)
def test_karcher_suite():
    res, _ = suite("karcher")
    assert res.summary["cases"] == 100 and not failed(res)
    assert max(r["values"]["residual"] for r in res.records) <= 1e-12
    for key in ("two_variable_geometric_mean", "permutation_invariance", "congruence_invariance",
                "self_duality", "power_log_majorization", "log_euclidean_envelope"):
        assert len(all_checks(res, key)) == 100
    assert len(all_checks(res, "compound_compatibility")) == 100  # m ≤ 4 throughout
    assert res.summary["worst_margin"] >= -1e-8
    lt = [r["values"]["lie_trotter_distances"] for r in res.records if "lie_trotter_distances" in r["values"]]
    assert lt and all(all(b < a for a, b in zip(d, d[1:])) and d[-1] < 1e-3 for d in lt)


# -- 6 ---------------------------------------------------------------------------

@pytest.mark.acceptance(6)
def test_expansion_suite():
    res, _ = suite("taylor")
    assert res.summary["cases"] == 100 and not failed(res)
    assert max(r["values"]["closed_form_deviation"] for r in res.records) <= 1e-10
    assert max(max(abs(x) for x in r["values"]["trace_defects"][:3]) for r in res.records) <= 1e-10
    a_only = [r for r in res.records if r["values"]["a_only"]]
    assert a_only and all(abs(r["values"]["trace_defects"][3]) <= 1e-9 for r in a_only)
    assert len(all_checks(res, "finite_difference_agreement")) == 10


@pytest.mark.acceptance(6)
def test_fourth_order_defect_stated_coefficient():
    """k = 4 trace defect against the stated coefficient 1/6 with a negative sign.

    The recursion, the closed forms and a direct solver-based estimate all give
    coefficient 1/12 (see test_expansion), so this check fails by a factor of 2.
    """
    worst = 0.0
    for i in range(20):
        rng = case_rng(7, "defect-coefficient", i)
        n = 2 + i % 3
        Hs = [random_hermitian(rng, 3) for _ in range(n)]
        w = random_weights(rng, n)
        st = taylor_recursion(Hs, w, 4)
        H1 = st.Hmoments[1]
        s = sum(wj * np.linalg.norm(H1 @ H - H @ H1, "fro") ** 2 for wj, H in zip(w, Hs))
        worst = max(worst, abs(st.trace_defects()[3] - (-s / 6)))
    assert worst <= 1e-9


# -- 7 ---------------------------------------------------------------------------

@pytest.mark.acceptance(7)
def test_equality_case_suite():
    res, _ = suite("eqcase")
    assert not failed(res)
    kinds = [r["values"]["kind"] for r in res.records]
    assert kinds.count("commuting") == 50
    assert kinds.count("condition_a_only") == 20
    assert kinds.count("generic") == 50
    assert all(all_checks(res, "verdicts_consistent"))
    for r in res.records:
        v = r["values"]
        expect = v["kind"] != "generic"
        assert (v["a"], v["b"], v["c"], v["d"]) == (expect,) * 4
        if v["kind"] == "generic":
            assert v["max_probe_drop"] > 1e-6
        if v["kind"] == "condition_a_only":
            assert v["max_pair_commutator"] > 1e-6


# -- 8 ---------------------------------------------------------------------------

@pytest.mark.acceptance(8)
def test_ltk_suite():
    res, _ = suite("ltk")
    assert not failed(res)
    sing = [r["values"] for r in res.records if r["values"]["kind"] == "singular"]
    assert len(sing) == 50
    for v in sing:
        e = v["errors"]
        assert all(b < a or a == b == 0.0 for a, b in zip(e, e[1:]))
    comm = [r["values"] for r in res.records if r["values"]["kind"] == "commuting_singular"]
    # error is judged relative to 1 + ‖target‖
    assert len(comm) == 10 and all(all_checks(res, "commuting_exact"))


# -- 9 ---------------------------------------------------------------------------

def _run_all(out):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "logmaj.cli", "run", "all", "--out", str(out)],
                          capture_output=True, text=True, timeout=600)
    return proc, time.perf_counter() - t0


def _tree(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


@pytest.mark.acceptance(9)
def test_full_run_reproducible(tmp_path):
    proc, secs = _run_all(tmp_path / "a")
    assert proc.returncode == 0, proc.stderr
    assert secs < 300
    total = json.loads((tmp_path / "a" / "all.summary.json").read_text())
    assert total["failures"] == 0 and set(total["suites"]) == set(SUITES)
    again, _ = _run_all(tmp_path / "b")
    assert again.returncode == 0
    assert _tree(tmp_path / "a") == _tree(tmp_path / "b")
    # a suite run on its own writes the same records as inside the full run
    one = subprocess.run([sys.executable, "-m", "logmaj.cli", "run", "ltk", "--out", str(tmp_path / "one")],
                         capture_output=True, text=True)
    assert one.returncode == 0
    assert (tmp_path / "one" / "ltk.jsonl").read_bytes() == (tmp_path / "a" / "ltk.jsonl").read_bytes()
