import cmath
import math

import numpy as np
import pytest
import scipy.linalg as sla

from conftest import random_herm, random_pd
from logmaj.linalg import (
    ConvergenceError,
    DomainError,
    as_pd,
    as_psd,
    commutator_norm,
    complex_power,
    direct_sum,
    expmh,
    hermitian_eig,
    jacobi_eigh,
    ky_fan_norm,
    logm,
    matrix_function,
    operator_norm,
    pinvh,
    powm,
    projection_meet,
    schatten_norm,
    singular_values,
    sqrtm,
    support_projection,
)
from logmaj.norms import FROBENIUS, OPERATOR, TRACE, parse_norm


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_diagonal_sorted(method):
    w, U = hermitian_eig(np.diag([1.0, 3.0, 2.0]), method=method)
    assert np.allclose(w, [3, 2, 1])
    assert np.allclose(np.abs(U), np.abs(U).round())


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_identity_and_2x2(method):
    w, U = hermitian_eig(np.eye(3), method=method)
    assert np.allclose(w, 1) and np.allclose(U @ U.conj().T, np.eye(3))
    w, _ = hermitian_eig([[2.0, 1.0], [1.0, 2.0]], method=method)
    # roots of λ² - 4λ + 3
    assert np.allclose(w, [3.0, 1.0], atol=1e-14)


def test_jacobi_matches_lapack(rng):
    for m in range(1, 7):
        A = random_herm(rng, m)
        w, U = jacobi_eigh(A)
        assert np.allclose(w, np.sort(np.linalg.eigvalsh(A))[::-1], atol=1e-12)
        assert np.allclose((U * w) @ U.conj().T, A, atol=1e-12)
        assert np.allclose(U.conj().T @ U, np.eye(m), atol=1e-12)


def test_jacobi_sweep_cap(rng):
    with pytest.raises(ConvergenceError) as err:
        jacobi_eigh(random_herm(rng, 6), max_sweeps=1, tol=1e-300)
    assert len(err.value.history) >= 1


def test_functional_calculus_examples():
    assert np.allclose(powm(np.diag([4.0, 9.0]), 0.5), np.diag([2.0, 3.0]))
    assert np.allclose(logm(np.diag([math.e, 0.0]), zero=0.0), np.diag([1.0, 0.0]))
    assert np.allclose(pinvh(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    with pytest.raises(DomainError):
        logm(np.diag([1.0, 0.0]))


def test_complex_power_examples():
    assert np.allclose(complex_power(np.eye(2), 1 + 0.7j), np.eye(2))
    assert np.allclose(complex_power(np.diag([4.0, 0.0]), 1.0), np.diag([4.0, 0.0]))
    v = complex_power(np.array([[math.e]]), 1j)[0, 0]
    assert abs(v - cmath.exp(1j)) < 1e-15


def test_functions_against_scipy(rng):
    for m in (2, 4, 6):
        A = random_pd(rng, m)
        H = random_herm(rng, m)
        assert np.allclose(expmh(H), sla.expm(H), atol=1e-12)
        assert np.allclose(logm(A), sla.logm(A), atol=1e-10)
        assert np.allclose(sqrtm(A), sla.sqrtm(A), atol=1e-10)
        assert np.allclose(powm(A, 0.3), sla.fractional_matrix_power(A, 0.3), atol=1e-10)


def test_singular_values_examples():
    U = sla.expm(1j * random_herm(np.random.default_rng(0), 3))
    assert np.allclose(singular_values(U), 1.0)
    assert np.allclose(singular_values(np.diag([-3.0, 2.0])), [3, 2])
    assert np.allclose(singular_values([[0.0, 2.0], [0.0, 0.0]]), [2, 0])


def test_norm_examples():
    assert schatten_norm(np.eye(3), 1) == pytest.approx(3)
    assert schatten_norm(np.diag([3.0, 4.0]), 2) == pytest.approx(5)
    assert operator_norm([[1.0, 1.0], [0.0, 1.0]]) == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-14)
    assert ky_fan_norm(np.diag([1.0, 5.0, 3.0]), 2) == pytest.approx(8)


def test_parse_norm():
    assert parse_norm("trace") == TRACE and parse_norm("frobenius") == FROBENIUS
    assert parse_norm("operator") == OPERATOR
    assert parse_norm("schatten:3").index == 3
    assert parse_norm("kyfan:2")(np.diag([1.0, 5.0, 3.0])) == pytest.approx(8)
    assert parse_norm("schatten:4").strictly_increasing
    assert not OPERATOR.strictly_increasing
    assert str(parse_norm("schatten:3")) == "schatten:3"
    for bad in ("nuclear", "schatten", "schatten:0.5"):
        with pytest.raises(ValueError):
            parse_norm(bad)


def test_support_projection_examples():
    assert np.allclose(support_projection(np.diag([2.0, 0.0])), np.diag([1.0, 0.0]))
    assert np.allclose(support_projection(random_pd(np.random.default_rng(1), 3)), np.eye(3))
    v = np.array([1.0, 2.0, 2.0j]) / 3.0
    P = np.outer(v, v.conj())
    assert np.allclose(support_projection(5 * P), P)


def test_projection_meet_examples(rng):
    P = np.diag([1.0, 0.0])
    assert np.allclose(projection_meet(P, P), P)
    assert np.allclose(projection_meet(P, np.diag([0.0, 1.0])), 0)
    Q1 = np.linalg.qr(rng.standard_normal((3, 2)))[0]
    Q2 = np.linalg.qr(rng.standard_normal((3, 2)))[0]
    P1, P2 = Q1 @ Q1.T, Q2 @ Q2.T
    M = projection_meet(P1, P2)
    # oracle: null space of the stacked complements
    N = sla.null_space(np.vstack([np.eye(3) - P1, np.eye(3) - P2]))
    assert N.shape[1] == 1
    assert np.allclose(M, N @ N.conj().T, atol=1e-10)
    assert np.allclose(M @ M, M, atol=1e-12) and np.allclose(M, M.conj().T)


def test_validation():
    with pytest.raises(ValueError):
        as_psd(np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        as_psd([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(DomainError):
        as_pd(np.diag([1.0, 0.0]))
    with pytest.raises(ValueError):
        matrix_function(np.ones((2, 3)), np.sqrt)


def test_direct_sum_and_commutator():
    D = direct_sum(np.eye(1), 2 * np.eye(2))
    assert np.allclose(D, np.diag([1.0, 2.0, 2.0]))
    assert commutator_norm(np.diag([1.0, 2.0]), [[0.0, 1.0], [1.0, 0.0]]) == pytest.approx(math.sqrt(2))
