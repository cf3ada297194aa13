"""Matrix means of positive definite matrices.

Weighted two-variable geometric mean, the Karcher (Riemannian) mean, the
Log-Euclidean mean and the power means, together with the log-majorization
relations that tie rescaled Karcher means of powers to the Log-Euclidean
mean.
"""

from __future__ import annotations

import math

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .linalg import (
    ConvergenceError,
    DomainError,
    as_hermitian,
    eigvalsh,
    from_eig,
    hermitian_eig,
    hermitize,
)
from .majorization import MajorizationReport, check_log_majorization

KARCHER_TOL = 1e-12
POWER_TOL = 1e-11
COND_LIMIT = 1e12


@dataclass(frozen=True)
class KarcherSolveResult:
    mean: np.ndarray
    residual: float
    iterations: int
    residual_history: tuple = field(repr=False)
    step_halvings: int = 0
    roundoff_floor: float = 0.0
    floor_limited: bool = False


def check_weights(weights, n: int) -> np.ndarray:
    """Validate a probability vector of length ``n``; ``None`` means uniform."""
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=float).ravel()
    if w.size != n:
        raise ValueError(f"expected {n} weights, got {w.size}")
    if np.any(w <= 0):
        raise ValueError("weights must be strictly positive")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"weights must sum to 1 (sum = {w.sum():.15g})")
    return w


def _pd_eig(A):
    """Validated eigendecomposition of a positive definite matrix."""
    A = as_hermitian(A)
    w, U = hermitian_eig(A)
    if w[-1] <= 0:
        raise DomainError(f"matrix is not positive definite (lambda_min = {w[-1]:.3e})")
    if w[0] / w[-1] > COND_LIMIT:
        raise DomainError(f"condition number {w[0] / w[-1]:.3e} exceeds {COND_LIMIT:.0e}")
    return w, U


def _pd_list(As) -> list:
    As = [np.asarray(A, dtype=complex) for A in As]
    if not As:
        raise ValueError("need at least one matrix")
    m = As[0].shape
    for A in As:
        if A.shape != m:
            raise ValueError("all matrices must have the same dimension")
    return As


def _fn(w, U, f) -> np.ndarray:
    return hermitize(from_eig(U, f(w)))


def _logh(A) -> np.ndarray:
    w, U = hermitian_eig(A)
    if w[-1] <= 0:
        raise DomainError(f"logarithm of a non positive definite matrix (lambda_min = {w[-1]:.3e})")
    return _fn(w, U, np.log)


def _exph(H) -> np.ndarray:
    w, U = hermitian_eig(H)
    return _fn(w, U, np.exp)


def geometric_mean_two(A, B, alpha: float) -> np.ndarray:
    """Weighted geometric mean ``A #_α B = A^{1/2} (A^{-1/2} B A^{-1/2})^α A^{1/2}``."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    w, U = _pd_eig(A)
    _pd_eig(B)
    R, Ri = _fn(w, U, np.sqrt), _fn(w, U, lambda x: x**-0.5)
    lam, V = hermitian_eig(Ri @ B @ Ri)
    return hermitize(R @ _fn(lam, V, lambda x: x**alpha) @ R)


def riemannian_distance(A, B) -> float:
    """Geodesic distance for the trace metric, ``(Σ log² λ_i(A^{-1}B))^{1/2}``."""
    w, U = _pd_eig(A)
    _pd_eig(B)
    Ri = _fn(w, U, lambda x: x**-0.5)
    lam = eigvalsh(Ri @ B @ Ri)
    return float(np.sqrt(np.sum(np.log(lam) ** 2)))


def log_euclidean_mean(As: Sequence, weights=None) -> np.ndarray:
    """``exp(Σ w_j log A_j)``."""
    As = _pd_list(As)
    w = check_weights(weights, len(As))
    L = sum(wj * _fn(*_pd_eig(A), np.log) for wj, A in zip(w, As))
    return _exph(L)


def _karcher_field(Xh: np.ndarray, inverses, w) -> tuple[np.ndarray, float, float]:
    """Karcher field at ``X = Xh^2``, the step suggested by the spread of each term,
    and an estimate of the roundoff floor of the field norm.

    The step is ``2 / Σ w_j (c_j + 1)/(c_j - 1) log c_j`` with ``c_j`` the
    condition number of ``X^{1/2} A_j^{-1} X^{1/2}`` (``(c+1)/(c-1) log c -> 2``
    as ``c -> 1``), capped at 1.  Forming that product loses about
    ``eps * c_j`` relative accuracy in its small eigenvalues, hence in the
    logarithm, so the floor is ``m * eps * Σ w_j c_j``.
    """
    F = np.zeros_like(Xh)
    denom = 0.0
    floor = 0.0
    for wj, Ai in zip(w, inverses):
        lam, U = hermitian_eig(Xh @ Ai @ Xh)
        if lam[-1] <= 0:
            raise DomainError("Karcher iterate left the positive definite cone")
        F += wj * _fn(lam, U, np.log)
        lc = math.log(lam[0] / lam[-1])
        denom += wj * (2.0 if lc < 1e-8 else lc / math.tanh(lc / 2))
        floor += wj * (lam[0] / lam[-1])
    floor *= Xh.shape[0] * np.finfo(float).eps
    return hermitize(F), min(1.0, 2.0 / denom), floor


def karcher_field(X, As: Sequence, weights=None) -> np.ndarray:
    """``Σ w_j log(X^{1/2} A_j^{-1} X^{1/2})``; zero exactly at the Karcher mean."""
    As = _pd_list(As)
    w = check_weights(weights, len(As))
    Xh = _fn(*_pd_eig(X), np.sqrt)
    inverses = [_fn(*_pd_eig(A), lambda x: 1.0 / x) for A in As]
    return _karcher_field(Xh, inverses, w)[0]


def karcher_mean(As: Sequence, weights=None, tol: float = KARCHER_TOL, max_iter: int = 500,
                 init=None, min_step: float = 2.0**-30) -> KarcherSolveResult:
    """Karcher mean of positive definite matrices.

    Fixed-point iteration ``X <- X^{1/2} exp(-s F(X)) X^{1/2}`` where ``F`` is
    the Karcher field, started at the Log-Euclidean mean.  Each step
    ``s ∈ (0, 1]`` is set from the condition numbers of the terms of the
    field (unit step when they are all close to 1) and halved while the
    field norm would increase, so the recorded residuals are non-increasing.

    When no step reduces the residual any further and it already lies
    within the roundoff floor of the field evaluation (relevant only for
    badly conditioned inputs), the iterate is returned with
    ``floor_limited=True`` instead of raising.

    Parameters
    ----------
    As : sequence of ndarray, shape (m, m)
        Positive definite matrices.
    weights : array_like, optional
        Strictly positive weights summing to one; uniform by default.
    tol : float
        Target Frobenius norm of the Karcher field.
    max_iter : int
        Maximum number of accepted steps.
    init : ndarray, optional
        Starting point; the Log-Euclidean mean by default.

    Returns
    -------
    KarcherSolveResult

    Raises
    ------
    ConvergenceError
        After ``max_iter`` steps, or when step halving underflows
        ``min_step``; ``history`` holds the residuals.
    """
    As = _pd_list(As)
    w = check_weights(weights, len(As))
    eigs = [_pd_eig(A) for A in As]
    inverses = [_fn(lam, U, lambda x: 1.0 / x) for lam, U in eigs]
    if init is None:
        X = _exph(sum(wj * _fn(lam, U, np.log) for wj, (lam, U) in zip(w, eigs)))
    else:
        X = as_hermitian(init)

    def evaluate(X):
        Xh = _fn(*_pd_eig(X), np.sqrt)
        F, s, floor = _karcher_field(Xh, inverses, w)
        return Xh, F, float(np.linalg.norm(F)), s, floor

    Xh, F, r, s, floor = evaluate(X)
    history = [r]
    halvings = 0
    it = 0
    while r > tol:
        if it >= max_iter:
            raise ConvergenceError(
                f"Karcher iteration stopped at residual {r:.3e} after {it} steps", history)
        step = s
        while True:
            Xn = hermitize(Xh @ _exph(-step * F) @ Xh)
            Xhn, Fn, rn, sn, floorn = evaluate(Xn)
            if rn <= r:
                break
            step *= 0.5
            halvings += 1
            if step < min_step:
                if r <= floor:
                    return KarcherSolveResult(X, r, it, tuple(history), halvings, floor, True)
                raise ConvergenceError(
                    f"Karcher step size underflow at residual {r:.3e}", history)
        X, Xh, F, r, s, floor = Xn, Xhn, Fn, rn, sn, floorn
        history.append(r)
        it += 1
    return KarcherSolveResult(X, r, it, tuple(history), halvings, floor)


def karcher_power_mean(As: Sequence, weights, t: float, **kw) -> np.ndarray:
    """``G_ω(A_1^t, ..., A_n^t)``, the Karcher mean of the powers."""
    powered = [_fn(*_pd_eig(A), lambda x: x**t) for A in _pd_list(As)]
    return karcher_mean(powered, weights, **kw).mean


def power_mean(As: Sequence, weights, t: float, tol: float = POWER_TOL,
               max_iter: int = 20000) -> np.ndarray:
    """Power mean ``P_{t,ω}`` for ``t ∈ [-1, 1] \\ {0}``.

    For ``t > 0`` this iterates ``X <- Σ w_j (X #_t A_j)`` until
    ``‖Σ w_j (X^{-1/2} A_j X^{-1/2})^t - I‖_F <= tol``.  Negative ``t`` is
    reduced to ``-t`` through ``P_t(A) = P_{-t}(A^{-1})^{-1}``.
    """
    if not (-1.0 <= t <= 1.0) or t == 0:
        raise ValueError(f"t must lie in [-1, 1] without 0, got {t}")
    As = _pd_list(As)
    w = check_weights(weights, len(As))
    if t < 0:
        inv = [_fn(*_pd_eig(A), lambda x: 1.0 / x) for A in As]
        P = power_mean(inv, w, -t, tol=tol, max_iter=max_iter)
        return _fn(*_pd_eig(P), lambda x: 1.0 / x)
    X = log_euclidean_mean(As, w)
    eye = np.eye(X.shape[0])
    history = []
    for _ in range(max_iter):
        lam, U = _pd_eig(X)
        Xh, Xhi = _fn(lam, U, np.sqrt), _fn(lam, U, lambda x: x**-0.5)
        S = hermitize(sum(wj * _fn(*hermitian_eig(Xhi @ A @ Xhi), lambda x: x**t)
                          for wj, A in zip(w, As)))
        r = float(np.linalg.norm(S - eye))
        history.append(r)
        if r <= tol:
            return X
        X = hermitize(Xh @ S @ Xh)
    raise ConvergenceError(f"power mean iteration stopped at residual {history[-1]:.3e}", history)


class MeanReports(NamedTuple):
    between_powers: MajorizationReport
    against_log_euclidean: MajorizationReport
    spectra: dict


def power_log_majorization_check(As: Sequence, weights, p: float, q: float,
                                 tol: float = 1e-8, karcher_tol: float = KARCHER_TOL) -> MeanReports:
    """Check ``G(A^p)^{1/p} ≺_log G(A^q)^{1/q}`` and ``G(A^p)^{1/p} ≺_log LE(A)``.

    Requires ``0 < q <= p``.  ``tol`` applies to the majorization margins,
    ``karcher_tol`` to the solver.
    """
    kw = {"tol": karcher_tol}
    if not 0 < q <= p:
        raise ValueError(f"need 0 < q <= p, got p={p}, q={q}")
    As = _pd_list(As)
    w = check_weights(weights, len(As))
    gp = eigvalsh(karcher_power_mean(As, w, p, **kw)) ** (1.0 / p)
    gq = gp if q == p else eigvalsh(karcher_power_mean(As, w, q, **kw)) ** (1.0 / q)
    le = eigvalsh(log_euclidean_mean(As, w))
    return MeanReports(
        check_log_majorization(gp, gq, tol),
        check_log_majorization(gp, le, tol),
        {"p": gp, "q": gq, "log_euclidean": le},
    )


def lie_trotter_scan(As: Sequence, weights, qs: Sequence[float], **kw) -> list:
    """Distances ``δ(G(A^q)^{1/q}, LE(A))`` along a decreasing sequence ``qs``."""
    As = _pd_list(As)
    w = check_weights(weights, len(As))
    if any(q <= 0 for q in qs) or any(b >= a for a, b in zip(qs, qs[1:])):
        raise ValueError("q sequence must be positive and strictly decreasing")
    le = log_euclidean_mean(As, w)
    rows = []
    for q in qs:
        G = karcher_power_mean(As, w, q, **kw)
        Gq = _fn(*_pd_eig(G), lambda x: x ** (1.0 / q))
        rows.append(riemannian_distance(Gq, le))
    return rows
