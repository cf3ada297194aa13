import math

import numpy as np
import pytest
import scipy.linalg as sla
from scipy.integrate import quad

from conftest import random_herm, random_pd
from logmaj.ensembles import commuting_family
from logmaj.golden_thompson import (
    beta_density,
    block_equality_triple,
    build_quadrature,
    gt_check,
    gt_log_majorization,
    lieb_triple_integral,
    tail_constant,
)
from logmaj.linalg import DomainError, PreconditionError, direct_sum

H = np.diag([1.0, 0.0])
K = np.array([[0.0, 1.0], [1.0, 0.0]])
EXAMPLE_TRACE = (math.e + 1 / math.e) + (math.e + 1)


def test_density_values():
    assert beta_density(0.0, 0.0) == pytest.approx(math.pi / 4, abs=1e-15)
    assert beta_density(0.5, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert beta_density(0.3, 1.2) == beta_density(0.3, -1.2)
    with pytest.raises(ValueError):
        beta_density(1.0, 0.0)


@pytest.mark.parametrize("theta", [0.0, 0.3, 0.7])
def test_density_normalized(theta):
    mass = 2 * quad(lambda t: beta_density(theta, t), 0, np.inf, epsabs=1e-14, epsrel=1e-13)[0]
    assert mass == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("theta", [0.0, 0.3, 0.7, 0.95])
def test_tail_constant_bounds_density(theta):
    C = tail_constant(theta)
    t = np.linspace(1, 12, 200)
    assert np.all(beta_density(theta, t) <= C * np.exp(-math.pi * t) * (1 + 1e-12))


@pytest.mark.parametrize("theta", [0.0, 0.3, 0.7, 0.95])
def test_quadrature_mass(theta):
    for eps in (1e-6, 1e-8, 1e-12):
        q = build_quadrature(theta, eps)
        assert 1 - 2 * eps <= q.mass <= 1 + 1e-13
        assert q.tail_bound == pytest.approx(eps, rel=1e-9) or q.T == 1.0


def test_quadrature_T():
    q = build_quadrature(0.0, 1e-8)
    assert q.T == pytest.approx(math.log(2 * math.pi / (math.pi * 1e-8)) / math.pi)
    assert q.T == pytest.approx(math.log(math.pi / 1e-8) / math.pi, abs=0.2)
    assert build_quadrature(0.0, 0.5e-8).T > q.T
    assert build_quadrature(1.0).mass == 1.0


def test_quadrature_integrates_moments():
    q = build_quadrature(0.0, 1e-14)
    # second moment of β_0 is 1/3 (oracle: adaptive quadrature)
    m2 = 2 * quad(lambda t: t * t * beta_density(0.0, t), 0, np.inf, epsabs=1e-15)[0]
    # truncation drops at most about T^2 * eps of the t^2-weighted mass
    assert q.integrate(q.nodes**2) == pytest.approx(m2, abs=2 * q.T**2 * q.eps)
    assert m2 == pytest.approx(1 / 3, abs=1e-12)


def test_single_matrix_equality(rng):
    A = random_herm(rng, 3)
    rep = gt_check([A], r=1.7, quad=build_quadrature(0.0, 1e-12))
    assert rep.relative_gap == pytest.approx(0, abs=3e-12)


def test_two_matrix_classical_form(rng):
    H1, H2 = random_herm(rng, 3), random_herm(rng, 3)
    qd = build_quadrature(0.0, 1e-12)
    rep = gt_check([H1 / 2, H2 / 2], r=2, quad=qd)
    assert rep.lhs == pytest.approx(np.trace(sla.expm(H1 + H2)).real, rel=1e-12)
    assert rep.rhs == pytest.approx(np.trace(sla.expm(H1) @ sla.expm(H2)).real * qd.mass, rel=1e-12)
    assert rep.holds and rep.gap > 0
    D1, D2 = np.diag([0.3, -1.0, 2.0]), np.diag([1.0, 0.5, -0.2])
    rep = gt_check([D1, D2], r=1.5, quad=qd)
    assert abs(rep.relative_gap) < 1e-11


def test_rhs_against_adaptive_quadrature(rng):
    Hs = [random_herm(rng, 2, 0.6) for _ in range(3)]

    def integrand(t):
        P = np.eye(2, dtype=complex)
        for Hj in Hs:
            P = P @ sla.expm((1 + 1j * t) * Hj)
        return np.sum(np.linalg.svd(P, compute_uv=False) ** 1.3) * beta_density(0.0, t)

    oracle = 2 * quad(lambda t: (integrand(t) + integrand(-t)) / 2, 0, 40, limit=200, epsabs=1e-13)[0]
    rep = gt_check(Hs, r=1.3, quad=build_quadrature(0.0, 1e-13))
    assert rep.rhs == pytest.approx(oracle, rel=1e-10)


def test_random_triples_hold(rng):
    qd = build_quadrature(0.0, 1e-10)
    for _ in range(10):
        Hs = [random_herm(rng, 3) for _ in range(3)]
        for r in (1.0, 2.0):
            assert gt_check(Hs, r, qd).holds


def test_block_triple_example():
    tri = block_equality_triple(H, K)
    assert tri.all_noncommuting
    assert np.allclose(tri.H1 + tri.H2 + tri.H3, direct_sum(K, H))
    assert np.trace(sla.expm(tri.H1 + tri.H2 + tri.H3)).real == pytest.approx(EXAMPLE_TRACE, abs=1e-12)
    prod = sla.expm(tri.H1) @ sla.expm(tri.H2) @ sla.expm(tri.H3)
    assert np.trace(prod).real == pytest.approx(EXAMPLE_TRACE, abs=1e-12)
    qd = build_quadrature(0.0, 1e-8)
    for r in (0.5, 1.0, 2.0, 3.0):
        rep = gt_check([tri.H1, tri.H2, tri.H3], r, qd)
        assert abs(rep.gap) <= 10 * 1e-8 * rep.lhs
    assert gt_check([tri.H1, tri.H2, tri.H3], 1.0, qd).lhs == pytest.approx(EXAMPLE_TRACE, abs=1e-10)


def test_block_triple_requires_noncommuting():
    with pytest.raises(PreconditionError):
        block_equality_triple(H, np.diag([2.0, 3.0]))


def test_lieb_triple_form(rng):
    H1, H2, H3 = (random_herm(rng, 3, 0.7) for _ in range(3))
    qd = build_quadrature(0.0, 1e-12)
    val = lieb_triple_integral(H1, H2, H3, qd)
    # Tr|e^{(1+it)H1/2} e^{(1+it)H2/2} e^{(1+it)H3/2}|^2 is the same integrand at -t
    assert val == pytest.approx(gt_check([H1 / 2, H2 / 2, H3 / 2], 2.0, qd).rhs, rel=1e-12)
    assert val >= np.trace(sla.expm(H1 + H2 + H3)).real
    D, E = np.diag([0.2, -0.4, 1.0]), np.diag([1.0, 0.0, -1.0])
    val_c = lieb_triple_integral(D, E, D, qd)
    assert val_c == pytest.approx(np.trace(sla.expm(2 * D + E)).real * qd.mass, rel=1e-12)


def test_log_majorization_form(rng):
    As = [random_pd(rng, 3) for _ in range(3)]
    for theta in (0.3, 0.5, 0.9, 1.0):
        rep = gt_log_majorization(As, theta)
        assert rep.holds and abs(rep.final_equality_gap) < 1e-8
    fam = commuting_family(rng, 3, 3)
    rep = gt_log_majorization(fam, 0.5)
    assert np.all(np.abs(rep.margins) < 1e-8)
    with pytest.raises(DomainError):
        gt_log_majorization([np.diag([1.0, 0.0])], 0.5)
    with pytest.raises(ValueError):
        gt_log_majorization(As, 0.0)


def test_gt_rejects_wrong_measure(rng):
    with pytest.raises(ValueError):
        gt_check([random_herm(rng, 2)], quad=build_quadrature(0.5))
    with pytest.raises(ValueError):
        gt_check([random_herm(rng, 2)], r=0)
