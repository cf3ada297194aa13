"""Randomized property suites.

Each suite draws its cases from :func:`logmaj.ensembles.case_rng`, evaluates
a fixed list of named checks per case, and produces one JSON record per
case plus a summary ``{suite, cases, failures, worst_margin, seed}``.
Errors raised while evaluating a case are recorded on that case and count
as failures; they never abort the suite.

``margin`` on a case record is the smallest slack of the suite's main
inequality (negative means violated); it is ``null`` for cases without one.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import divergence as dv
from . import ensembles as ens
from .expansion import (
    closed_form_coefficients,
    equality_case_check,
    finite_difference_taylor,
    fourth_order_trace_defect,
    lie_trotter_kato,
    taylor_recursion,
)
from .golden_thompson import (
    block_equality_triple,
    build_quadrature,
    gt_check,
    gt_log_majorization,
    lieb_triple_integral,
)
from .io import dumps
from .linalg import commutator_norm, eigvalsh, expmh, hermitize, powm
from .majorization import (
    araki_equality_probe,
    araki_pair,
    check_weak_majorization,
    compound_matrix,
    extended_araki_norm_check,
    extended_araki,
    extended_araki_singular_values,
)
from .means import (
    geometric_mean_two,
    karcher_mean,
    lie_trotter_scan,
    log_euclidean_mean,
    power_log_majorization_check,
    power_mean,
    riemannian_distance,
)

DEFAULT_SEED = 42

DEFAULT_TOLS = {
    "log_tol": 1e-9,          # partial log-margins
    "det_tol": 1e-8,          # determinant identity (log domain, i.e. relative)
    "reduction_tol": 1e-10,
    "sv_tol": 1e-8,
    "norm_tol": 1e-9,
    "compound_tol": 1e-8,
    "probe_tol": 1e-10,
    "mono_tol": 1e-8,
    "convexity_tol": 1e-9,
    "scalar_tol": 1e-10,
    "covariance_tol": 1e-9,
    "quad_eps": 1e-12,
    "example_quad_eps": 1e-8,
    "gt_tol": 1e-8,
    "example_tol": 1e-6,
    "closed_form_tol": 1e-10,
    "commuting_gt_tol": 1e-9,
    "lieb_tol": 1e-9,
    "karcher_tol": 1e-12,
    "mean_tol": 1e-8,
    "geo2_tol": 1e-10,
    "mean_compound_tol": 1e-7,
    "mean_margin_tol": 1e-8,
    "lt_tol": 1e-3,
    "taylor_tol": 1e-10,
    "trace_tol": 1e-10,
    "defect_tol": 1e-9,
    "fd_floor": 1e-6,
    "eq_tol": 1e-7,
    "probe_drop": 1e-6,
    "ltk_exact_tol": 1e-12,
}

DEFAULT_CASES = {
    "araki": 1000,
    "extended": 500,
    "divergence": 200,
    "gt": 204,
    "karcher": 100,
    "taylor": 100,
    "eqcase": 120,
    "ltk": 60,
}

SUITES = tuple(DEFAULT_CASES)


@dataclass
class RunConfig:
    seed: int = DEFAULT_SEED
    tols: dict = field(default_factory=lambda: dict(DEFAULT_TOLS))
    cases: dict = field(default_factory=lambda: dict(DEFAULT_CASES))
    threads: int = 1

    def __post_init__(self):
        for k, v in self.tols.items():
            if not v > 0:
                raise ValueError(f"tolerance {k} must be positive, got {v}")

    def with_tols(self, **updates) -> "RunConfig":
        unknown = set(updates) - set(DEFAULT_TOLS)
        if unknown:
            raise ValueError(f"unknown tolerance key(s): {', '.join(sorted(unknown))}")
        return RunConfig(self.seed, {**self.tols, **updates}, dict(self.cases), self.threads)

    @classmethod
    def from_env(cls, seed: int = DEFAULT_SEED, **kw) -> "RunConfig":
        threads = max(1, int(os.environ.get("LOGMAJ_THREADS", "1") or 1))
        return cls(seed=seed, threads=threads, **kw)


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.linalg.norm(a - b) / max(1.0, np.linalg.norm(b)))


def _sorted_rel(a, b) -> float:
    return _rel(np.sort(np.asarray(a, dtype=float))[::-1], np.sort(np.asarray(b, dtype=float))[::-1])


@lru_cache(maxsize=None)
def _quad(theta: float, eps: float):
    return build_quadrature(theta, eps)


# -- araki -------------------------------------------------------------------

def _araki_case(rng, i, tol):
    m = 2 + i % 5
    p = (0.25, 0.5, 0.75)[(i // 5) % 3]
    variant = (i // 15) % 4
    A = ens.random_psd_rank(rng, m, m - 1) if variant == 2 else ens.random_pd(rng, m)
    B = ens.random_psd_rank(rng, m, m - 1) if variant == 1 else ens.random_pd(rng, m)
    res = araki_pair(A, B, p, tol["log_tol"], tol["det_tol"])
    checks = {
        "log_majorization": res.report.holds,
        "weak_majorization": check_weak_majorization(res.lhs, res.rhs, tol["log_tol"]).holds,
    }
    values = {"m": m, "p": p, "variant": variant,
              "det_gap": res.report.final_equality_gap}
    if i % 10 == 0:
        k = 1 + (i // 10) % m
        H = ens.random_hermitian(rng, m, 2.0)
        lam = eigvalsh(H)
        prods = [np.prod(c) for c in itertools.combinations(lam, k)]
        comp = np.linalg.eigvalsh(hermitize(compound_matrix(H, k)))
        err = _sorted_rel(comp, prods)
        checks["compound_spectrum"] = err <= tol["compound_tol"]
        values["compound_error"] = err
    if i % 25 == 0:
        A1, B1 = ens.commuting_family(rng, m, 2)
        probe = araki_equality_probe(A1, B1, 0.5, 1.0, "frobenius")
        checks["commuting_equality"] = abs(probe.gap) <= tol["probe_tol"]
        values["commuting_gap"] = probe.gap
    return checks, res.report.worst_margin, values


# -- extended ----------------------------------------------------------------

NORM_CYCLE = ("trace", "frobenius", "operator", "kyfan:1", "schatten:3")


def _extended_case(rng, i, tol):
    m = 2 + i % 5
    theta = (0.0, 0.3, 0.7, 1.0)[(i // 5) % 4]
    convention = ("identity", "support")[(i // 20) % 2]
    zeros = 0.25 if (i // 40) % 2 else 0.0
    A1, A2 = ens.commuting_family(rng, m, 2, zero_fraction=zeros)
    B1, B2 = ens.commuting_family(rng, m, 2, zero_fraction=zeros)
    eig = extended_araki(A1, A2, B1, B2, theta, convention, tol["log_tol"], tol["det_tol"])
    sv = extended_araki_singular_values(A1, A2, B1, B2, theta, convention, tol["log_tol"])
    sq = extended_araki(*(X @ X for X in (A1, A2, B1, B2)), theta, convention)
    sqrt_err = _sorted_rel(sv.lhs**2, sq.lhs)
    norm = NORM_CYCLE[i % len(NORM_CYCLE)]
    r = (0.5, 1.0, 2.0)[(i // 5) % 3]
    nc = extended_araki_norm_check(A1, A2, B1, B2, theta, r, norm, convention, tol["norm_tol"])
    eye = np.eye(m)
    horn = extended_araki_singular_values(A1, eye, eye, B2, theta, convention, tol["log_tol"])
    checks = {
        "eigenvalue_form": eig.report.holds,
        "singular_value_form": sv.report.holds,
        "square_relation": sqrt_err <= tol["sv_tol"],
        "norm_inequality": nc.holds,
        "horn_reduction": horn.report.holds,
    }
    values = {"m": m, "theta": theta, "convention": convention, "singular": bool(zeros),
              "norm": norm, "r": r, "norm_lhs": nc.lhs, "norm_rhs": nc.rhs,
              "square_relation_error": sqrt_err}
    if theta < 1:
        red = extended_araki(eye, A2, eye, B2, theta, convention)
        ref = araki_pair(A2, B2, 1 - theta)
        err = max(float(np.max(np.abs(red.lhs - ref.lhs))), float(np.max(np.abs(red.rhs - ref.rhs))))
        scale = max(1.0, float(np.max(ref.rhs)))
        checks["araki_reduction"] = err <= tol["reduction_tol"] * scale
        values["reduction_error"] = err
    return checks, min(eig.report.worst_margin, sv.report.worst_margin), values


# -- divergence --------------------------------------------------------------

ALPHA_GRID = tuple(np.linspace(0.0, 3.0, 41))
Z_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)


def _density(A):
    return A / np.trace(A).real


def _scalar_renyi(p, q, alpha, z):
    if alpha == 1:
        return float(np.sum(p * np.log(p / q)) / np.sum(p))
    return math.log(float(np.sum(p**alpha * q ** (1 - alpha))) / float(np.sum(p))) / (alpha - 1)


def _divergence_case(rng, i, tol):
    m = 2 + i % 5
    rho = _density(ens.random_pd(rng, m, 0.05))
    sigma = ens.random_pd(rng, m, 0.05)
    checks, values, margin = {}, {"m": m}, 0.0
    for z in (0.5, 1.0, 2.0):
        scan = dv.alpha_monotonicity_scan(rho, sigma, z, ALPHA_GRID, tol["mono_tol"])
        checks[f"alpha_monotone_z{z:g}"] = bool(scan.verdict)
        margin = min(margin, -scan.details["worst_drop"])
    z = (0.5, 1.0, 2.0)[i % 3]
    conv = dv.log_convexity_check(rho, sigma, z, 0.5, 2.5, (0.25, 0.5, 0.75), tol["convexity_tol"])
    checks["log_convexity"] = bool(conv.verdict)
    margin = min(margin, min((r[2] - r[1]) / max(1.0, r[2]) for r in conv.rows))
    up = dv.z_monotonicity_scan(rho, sigma, 0.5, Z_GRID, tol["mono_tol"])
    down = dv.z_monotonicity_scan(rho, sigma, 2.0, Z_GRID, tol["mono_tol"])
    checks["z_monotone_alpha0.5_increasing"] = bool(up.verdict)
    checks["z_monotone_alpha2_decreasing"] = bool(down.verdict)
    # commuting pair against the scalar formula
    U = ens.haar_unitary(rng, m)
    p, q = rng.uniform(0.1, 1.0, m), rng.uniform(0.1, 1.0, m)
    p /= p.sum()
    rc, sc = (U * p) @ U.conj().T, (U * q) @ U.conj().T
    err = 0.0
    for alpha in (0.0, 0.5, 1.0, 1.5, 3.0):
        for z in (0.5, 1.0, 2.0):
            ref = _scalar_renyi(p, q, alpha, z)
            got = dv.d_alpha_z(rc, sc, alpha, z).value
            err = max(err, abs(got - ref) / max(1.0, abs(ref)))
    checks["commuting_scalar_formula"] = err <= tol["scalar_tol"]
    values["scalar_error"] = err
    d1 = dv.d1_normalized(rho, sigma).value
    near = max(abs(dv.d_alpha_z(rho, sigma, a, 1.0).value - d1) for a in (1 - 1e-3, 1 + 1e-3))
    checks["alpha_to_one_limit"] = near <= 1e-2 * (1 + abs(d1))
    if i % 10 == 0:
        V = ens.haar_unitary(rng, m)
        a, z = (0.3, 0.7, 2.0)[i % 3], (0.5, 1.0, 2.0)[(i // 3) % 3]
        d0 = dv.d_alpha_z(rho, sigma, a, z).value
        dU = dv.d_alpha_z(V @ rho @ V.conj().T, V @ sigma @ V.conj().T, a, z).value
        checks["unitary_covariance"] = abs(d0 - dU) <= tol["covariance_tol"] * max(1.0, abs(d0))
    return checks, margin, values


# -- gt ------------------------------------------------------------------------

EXAMPLE_H = np.diag([1.0, 0.0])
EXAMPLE_K = np.array([[0.0, 1.0], [1.0, 0.0]])
EXAMPLE_RS = (0.5, 1.0, 2.0, 3.0)


def _gt_case(rng, i, tol):
    if i < len(EXAMPLE_RS):
        r = EXAMPLE_RS[i]
        eps = tol["example_quad_eps"]
        quad = _quad(0.0, eps)
        tri = block_equality_triple(EXAMPLE_H, EXAMPLE_K)
        rep = gt_check([tri.H1, tri.H2, tri.H3], r, quad)
        closed = (math.e + 1 / math.e) + (math.e + 1)
        lhs1 = gt_check([tri.H1, tri.H2, tri.H3], 1.0, quad).lhs
        checks = {
            "example_equality": abs(rep.gap) / rep.lhs <= tol["example_tol"],
            "example_closed_form": abs(lhs1 - closed) <= tol["closed_form_tol"],
            "example_noncommuting": tri.all_noncommuting,
            "quadrature_mass": 1 - 2 * eps <= quad.mass <= 1 + 2 * eps,
        }
        return checks, None, {"example": True, "r": r, "lhs": rep.lhs, "rhs": rep.rhs,
                              "relative_gap": rep.relative_gap, "mass": quad.mass}
    m = 2 + i % 3
    r = (1.0, 2.0)[i % 2]
    quad = _quad(0.0, tol["quad_eps"])
    Hs = [ens.random_hermitian(rng, m) for _ in range(3)]
    rep = gt_check(Hs, r, quad)
    checks = {"multivariate_gt": rep.gap >= -tol["gt_tol"]}
    values = {"m": m, "r": r, "lhs": rep.lhs, "rhs": rep.rhs, "gap": rep.gap}
    if i % 10 == 0:
        U = ens.haar_unitary(rng, m)
        Cs = [hermitize((U * rng.uniform(-1, 1, m)) @ U.conj().T) for _ in range(3)]
        c = gt_check(Cs, r, quad)
        checks["commuting_equality"] = abs(c.gap) <= tol["commuting_gt_tol"] * c.lhs
        lieb = lieb_triple_integral(*Hs, quad)
        half = gt_check([H / 2 for H in Hs], 2.0, quad).rhs
        checks["lieb_triple_form"] = abs(lieb - half) <= tol["lieb_tol"] * max(1.0, abs(half))
        two = gt_check(Hs[:2], 2.0, quad)
        checks["two_matrix_gt"] = two.gap >= -tol["gt_tol"]
        theta = (0.3, 0.5, 0.7)[(i // 10) % 3]
        lm = gt_log_majorization([expmh(H) for H in Hs], theta, _quad(theta, tol["quad_eps"]))
        checks["log_majorization_form"] = lm.holds
        values["log_majorization_margin"] = lm.worst_margin
    return checks, rep.gap, values


# -- karcher -------------------------------------------------------------------

def _compound_list(As, k):
    return [hermitize(compound_matrix(A, k)) for A in As]


def _karcher_case(rng, i, tol):
    m = 2 + i % 3
    n = 3
    As = [ens.random_well_conditioned(rng, m, 1.5) for _ in range(n)]
    w = ens.random_weights(rng, n)
    ktol = tol["karcher_tol"]
    res = karcher_mean(As, w, tol=ktol)
    G = res.mean
    mt = tol["mean_tol"]
    checks = {"solver_residual": res.residual <= ktol}
    perm = rng.permutation(n)
    Gp = karcher_mean([As[j] for j in perm], w[perm], tol=ktol).mean
    checks["permutation_invariance"] = _rel(Gp, G) <= mt
    M = ens.complex_gaussian(rng, (m, m)) + 2 * np.eye(m)
    Gc = karcher_mean([M.conj().T @ A @ M for A in As], w, tol=ktol).mean
    checks["congruence_invariance"] = _rel(Gc, M.conj().T @ G @ M) <= mt
    inv = karcher_mean([np.linalg.inv(A) for A in As], w, tol=ktol).mean
    checks["self_duality"] = _rel(np.linalg.inv(inv), G) <= mt
    if m <= 4:
        Gk = karcher_mean(_compound_list(As, 2), w, tol=ktol).mean
        checks["compound_compatibility"] = _rel(hermitize(compound_matrix(G, 2)), Gk) <= tol["mean_compound_tol"]
    alpha = float(rng.uniform(0.1, 0.9))
    G2 = karcher_mean(As[:2], [1 - alpha, alpha], tol=ktol).mean
    checks["two_variable_geometric_mean"] = _rel(G2, geometric_mean_two(As[0], As[1], alpha)) <= tol["geo2_tol"]
    rep = power_log_majorization_check(As, w, 2.0, 1.0, tol["mean_margin_tol"], ktol)
    checks["power_log_majorization"] = rep.between_powers.holds
    checks["log_euclidean_envelope"] = rep.against_log_euclidean.holds
    margin = min(rep.between_powers.worst_margin, rep.against_log_euclidean.worst_margin)
    c = 1.01 * float(eigvalsh(G)[0])
    scaled = [A / c for A in As]
    top = max(float(eigvalsh(karcher_mean([powm(A, p) for A in scaled], w, tol=ktol).mean)[0])
              for p in (1.5, 2.0, 3.0))
    checks["power_contraction"] = top <= 1 + 1e-8
    values = {"m": m, "iterations": res.iterations, "residual": res.residual,
              "step_halvings": res.step_halvings}
    if i % 10 == 0:
        d = lie_trotter_scan(As, w, (1.0, 0.5, 0.1, 0.01), tol=ktol)
        checks["lie_trotter"] = all(b < a for a, b in zip(d, d[1:])) and d[-1] < tol["lt_tol"]
        values["lie_trotter_distances"] = d
    if i % 20 == 0:
        d = [riemannian_distance(power_mean(As, w, t), G) for t in (0.5, 0.25, 0.1, 0.05)]
        checks["power_mean_limit"] = all(b < a for a, b in zip(d, d[1:]))
        values["power_mean_distances"] = d
    return checks, margin, values


# -- taylor --------------------------------------------------------------------

def _a_only_family(rng, m, n, radius=1.0):
    """Non-commuting Hermitian family with ``Σ w_j H_j = c I``."""
    w = ens.random_weights(rng, n)
    Hs = [ens.random_hermitian(rng, m, radius) for _ in range(n - 1)]
    c = float(rng.uniform(-0.5, 0.5))
    Hs.append(hermitize((c * np.eye(m) - sum(wj * H for wj, H in zip(w, Hs))) / w[-1]))
    return Hs, w


def _taylor_case(rng, i, tol):
    m = 2 + i % 3
    n = 2 + (i // 3) % 3
    if i % 5 == 4:
        Hs, w = _a_only_family(rng, m, n)
    else:
        Hs = [ens.random_hermitian(rng, m) for _ in range(n)]
        w = ens.random_weights(rng, n)
    st = taylor_recursion(Hs, w, 4)
    Xc, Yc = closed_form_coefficients(Hs, w)
    dev = max(max(float(np.max(np.abs(st.X[k + 1] - Xc[k]))) for k in range(4)),
              max(float(np.max(np.abs(st.Y[k + 1] - Yc[k]))) for k in range(4)))
    tr = st.trace_defects()
    fd = fourth_order_trace_defect(Hs, w)
    checks = {
        "recursion_matches_closed_form": dev <= tol["taylor_tol"],
        "first_log_coefficient_zero": float(np.max(np.abs(st.Zsums[1]))) <= 1e-12,
        "trace_identities_k_le_3": max(abs(x) for x in tr[:3]) <= tol["trace_tol"],
        "fourth_order_defect_trace_form": abs(tr[3] - fd["trace_form"]) <= tol["defect_tol"],
        "fourth_order_defect_commutator_form": abs(tr[3] - fd["commutator_form"]) <= tol["defect_tol"],
    }
    values = {"m": m, "n": n, "a_only": i % 5 == 4, "closed_form_deviation": dev,
              "trace_defects": tr, "commutator_sum": fd["commutator_sum"]}
    if i % 5 == 4:
        checks["defect_vanishes_on_condition_a"] = abs(tr[3]) <= tol["defect_tol"]
    if i % 10 == 0:
        est = finite_difference_taylor(Hs, w, 3)
        errs = [float(np.linalg.norm(est.coefficients[k] - st.X[k + 1])) for k in range(3)]
        checks["finite_difference_agreement"] = all(
            e <= max(tol["fd_floor"], 10 * b) for e, b in zip(errs, est.error_estimates))
        values["finite_difference_errors"] = errs
    return checks, -dev, values


# -- eqcase --------------------------------------------------------------------

EQ_NORMS = ("trace", "frobenius", "schatten:3")


def _eqcase_case(rng, i, tol):
    m = 2 + i % 3
    n = 3
    norm = EQ_NORMS[i % 3]
    if i < 50:
        kind = "commuting"
        As = ens.commuting_family(rng, m, n, 0.3, 3.0)
        w = ens.random_weights(rng, n)
    elif i < 70:
        kind = "condition_a_only"
        Hs, w = _a_only_family(rng, m, n, 0.5)
        As = [expmh(H) for H in Hs]
    else:
        kind = "generic"
        As = [ens.random_well_conditioned(rng, m, 1.0) for _ in range(n)]
        w = ens.random_weights(rng, n)
    rep = equality_case_check(As, w, norm, 1.0, tol["eq_tol"], tol=tol["karcher_tol"])
    expect = kind != "generic"
    checks = {
        "verdicts_consistent": rep.consistent,
        "verdicts_expected": rep.a == expect,
    }
    drops = rep.values["probe_relative_drops"]
    values = {"kind": kind, "m": m, "norm": norm, "a": rep.a, "b": rep.b, "c": rep.c, "d": rep.d,
              "e_not_strictly_decreasing": rep.e_not_strictly_decreasing,
              "max_probe_drop": max(drops)}
    if kind == "condition_a_only":
        pairwise = max(commutator_norm(As[j], As[k]) for j in range(n) for k in range(j + 1, n))
        checks["pairs_noncommuting"] = pairwise > 1e-6
        values["max_pair_commutator"] = pairwise
    if kind == "generic":
        checks["probe_strict_decrease"] = max(drops) > tol["probe_drop"]
        return checks, max(drops) - tol["probe_drop"], values
    checks["probe_flat"] = rep.e_not_strictly_decreasing
    return checks, None, values


# -- ltk -------------------------------------------------------------------------

LTK_TS = tuple(2.0**-k for k in range(1, 9))


def _ltk_case(rng, i, tol):
    m = 2 + i % 4
    if i % 6 == 5:
        A, B = ens.commuting_family(rng, m, 2, zero_fraction=0.4)
        res = lie_trotter_kato(A, B, LTK_TS)
        worst = max(e for _, e in res.rows)
        bound = tol["ltk_exact_tol"] * (1 + float(np.linalg.norm(res.target)))
        return ({"commuting_exact": worst <= bound}, None,
                {"kind": "commuting_singular", "m": m, "max_error": worst, "meet_rank": res.meet_rank})
    A = ens.random_psd_rank(rng, m, m - 1, 0.05)
    B = ens.random_psd_rank(rng, m, m - 1 if i % 3 else max(1, m - 2), 0.05)
    res = lie_trotter_kato(A, B, LTK_TS)
    errs = [e for _, e in res.rows]
    steps = [(a - b) / a for a, b in zip(errs, errs[1:]) if a > 0]
    return ({"error_strictly_decreasing": res.decreasing}, min(steps) if steps else None,
            {"kind": "singular", "m": m, "meet_rank": res.meet_rank, "errors": errs})


CASE_FUNCS = {
    "araki": _araki_case,
    "extended": _extended_case,
    "divergence": _divergence_case,
    "gt": _gt_case,
    "karcher": _karcher_case,
    "taylor": _taylor_case,
    "eqcase": _eqcase_case,
    "ltk": _ltk_case,
}


def run_case(suite: str, index: int, cfg: RunConfig) -> dict:
    rng = ens.case_rng(cfg.seed, suite, index)
    rec = {"suite": suite, "case": index}
    try:
        checks, margin, values = CASE_FUNCS[suite](rng, index, cfg.tols)
    except Exception as exc:  # recorded per case, never fatal
        rec.update(ok=False, error=f"{type(exc).__name__}: {exc}")
        return rec
    checks = {k: bool(v) for k, v in checks.items()}
    rec.update(ok=all(checks.values()), checks=checks,
               margin=None if margin is None else float(margin), values=values)
    return rec


@dataclass
class SuiteResult:
    suite: str
    records: list
    summary: dict

    @property
    def ok(self) -> bool:
        return self.summary["failures"] == 0


def run_suite(name: str, cfg: RunConfig | None = None) -> SuiteResult:
    """Run one suite; records come back in case order regardless of threading."""
    cfg = RunConfig() if cfg is None else cfg
    if name not in CASE_FUNCS:
        raise KeyError(f"unknown suite {name!r}")
    n = cfg.cases[name]
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            records = list(pool.map(lambda i: run_case(name, i, cfg), range(n)))
    else:
        records = [run_case(name, i, cfg) for i in range(n)]
    margins = [r["margin"] for r in records if r.get("margin") is not None]
    failed = [r for r in records if not r["ok"]]
    summary = {
        "suite": name,
        "cases": n,
        "failures": len(failed),
        "worst_margin": min(margins) if margins else None,
        "seed": cfg.seed,
    }
    if failed:
        counts = {}
        for r in failed:
            for k in ([k for k, v in r.get("checks", {}).items() if not v] or ["error"]):
                counts[k] = counts.get(k, 0) + 1
        summary["failed_checks"] = dict(sorted(counts.items()))
    return SuiteResult(name, records, summary)


def write_suite(result: SuiteResult, out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cases = out / f"{result.suite}.jsonl"
    summary = out / f"{result.suite}.summary.json"
    cases.write_text("".join(dumps(r) + "\n" for r in result.records))
    summary.write_text(dumps(result.summary, indent=2) + "\n")
    return cases, summary


def run_all(cfg: RunConfig | None = None, out_dir=None) -> list:
    results = []
    for name in SUITES:
        res = run_suite(name, cfg)
        if out_dir is not None:
            write_suite(res, out_dir)
        results.append(res)
    if out_dir is not None:
        total = {
            "suite": "all",
            "cases": sum(r.summary["cases"] for r in results),
            "failures": sum(r.summary["failures"] for r in results),
            "worst_margin": None,
            "seed": (cfg or RunConfig()).seed,
            "suites": {r.suite: r.summary for r in results},
        }
        Path(out_dir, "all.summary.json").write_text(dumps(total, indent=2) + "\n")
    return results
