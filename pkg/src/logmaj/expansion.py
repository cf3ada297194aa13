"""Power series of the Karcher mean along one-parameter groups, and related checks.

For Hermitian ``H_1, ..., H_n`` and weights ``w`` write

    X(t) = G_w(e^{tH_1}, ..., e^{tH_n}) = I + t X_1 + t^2 X_2 + ...
    Y(t) = X(t)^{1/2}                   = I + t Y_1 + t^2 Y_2 + ...
    Z_j(t) = Y(t) e^{-tH_j} Y(t)         = I + t Z_{1,j} + ...

The Karcher equation ``Σ w_j log Z_j(t) = 0`` determines the coefficients
recursively.  This module computes them, cross-checks them against closed
forms for k <= 4 and against finite differences of the Karcher solver, and
implements the equality-case checker for the norm inequality between the
Karcher and Log-Euclidean means.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .linalg import (
    PreconditionError,
    as_hermitian,
    as_psd,
    commutator_norm,
    expmh,
    hermitian_eig,
    hermitize,
    logm,
    powm,
    projection_meet,
    support_projection,
)
from .means import (
    _pd_eig,
    check_weights,
    karcher_mean,
    log_euclidean_mean,
    riemannian_distance,
)
from .norms import parse_norm

ORDER_CAP = 8
EQ_TOL = 1e-7


def _compositions(k: int, r: int):
    """Ordered tuples of ``r`` positive integers summing to ``k``."""
    for cuts in itertools.combinations(range(1, k), r - 1):
        bounds = (0,) + cuts + (k,)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


def _coef(q: Fraction) -> float:
    return q.numerator / q.denominator


@dataclass
class TaylorState:
    """Coefficients ``X_k, Y_k, Z_{k,j}`` for ``k <= order``.

    Lists are indexed by ``k`` with index 0 holding the identity, so
    ``X[k]`` is ``X_k``; ``Z[k][j]`` is ``Z_{k,j}``; ``Hmoments[k]`` is
    ``Σ w_j H_j^k`` and ``Zsums[k]`` is ``Σ w_j Z_{k,j}``.
    """

    order: int
    weights: np.ndarray
    X: list = field(repr=False)
    Y: list = field(repr=False)
    Z: list = field(repr=False)
    Hmoments: list = field(repr=False)
    Zsums: list = field(repr=False)

    def trace_defects(self) -> list:
        """``Tr X_k - Tr (H^{(1)})^k / k!`` for ``k = 1..order``."""
        H1 = self.Hmoments[1]
        out, P = [], np.eye(H1.shape[0])
        for k in range(1, self.order + 1):
            P = P @ H1
            out.append(float(np.trace(self.X[k]).real - np.trace(P).real / math.factorial(k)))
        return out


def _setup(H_list, weights):
    Hs = [as_hermitian(H) for H in H_list]
    if not Hs:
        raise ValueError("need at least one matrix")
    w = check_weights(weights, len(Hs))
    return Hs, w


def taylor_recursion(H_list: Sequence, weights=None, K: int = 4, cap: int = ORDER_CAP) -> TaylorState:
    """Run the coefficient recursion up to order ``K``.

    For ``k >= 2`` the order is: ``Z^{(k)}`` from the logarithm series of the
    Karcher equation, then ``Y_k``, then ``Z_{k,j}``.  Rational prefactors
    ``(-1)^r/r`` and ``(-1)^l/l!`` are formed exactly before conversion.
    """
    if not 1 <= K <= cap:
        raise ValueError(f"order must lie in 1..{cap}, got {K}")
    Hs, w = _setup(H_list, weights)
    m = Hs[0].shape[0]
    eye = np.eye(m, dtype=complex)
    n = len(Hs)
    Hpow = [[eye] for _ in Hs]
    for j, H in enumerate(Hs):
        for _ in range(K):
            Hpow[j].append(Hpow[j][-1] @ H)
    Hmom = [sum(w[j] * Hpow[j][l] for j in range(n)) for l in range(K + 1)]
    Y = [eye, Hmom[1] / 2]
    Z = [[eye] * n, [2 * Y[1] - Hs[j] for j in range(n)]]
    Zs = [eye, sum(w[j] * Z[1][j] for j in range(n))]

    def sandwich(k, M):
        # Σ_{l=1..k} (-1)^l / l! Σ_{r=0..k-l} Y_r M_l Y_{k-l-r}
        total = np.zeros((m, m), dtype=complex)
        for l in range(1, k + 1):
            c = _coef(Fraction((-1) ** l, math.factorial(l)))
            total += c * sum(Y[r] @ M[l] @ Y[k - l - r] for r in range(k - l + 1))
        return total

    for k in range(2, K + 1):
        Zk = np.zeros((m, m), dtype=complex)
        for r in range(2, k + 1):
            c = _coef(Fraction((-1) ** r, r))
            for parts in _compositions(k, r):
                for j in range(n):
                    P = Z[parts[0]][j]
                    for p in parts[1:]:
                        P = P @ Z[p][j]
                    Zk += c * w[j] * P
        Zs.append(hermitize(Zk))
        cross = sum(Y[r] @ Y[k - r] for r in range(1, k))
        Y.append(hermitize((Zs[k] - cross - sandwich(k, Hmom)) / 2))
        Z.append([hermitize(2 * Y[k] + cross + sandwich(k, Hpow[j])) for j in range(n)])
    X = [eye] + [hermitize(sum(Y[l] @ Y[k - l] for l in range(k + 1))) for k in range(1, K + 1)]
    return TaylorState(K, w, X, Y, Z, Hmom, Zs)


def closed_form_coefficients(H_list: Sequence, weights=None) -> tuple[list, list]:
    """Closed forms of ``X_1..X_4`` and ``Y_1..Y_4``, returned as ``([X1..X4], [Y1..Y4])``."""
    Hs, w = _setup(H_list, weights)
    H1 = sum(wj * H for wj, H in zip(w, Hs))
    H2 = sum(wj * H @ H for wj, H in zip(w, Hs))
    S = sum(wj * H @ H1 @ H for wj, H in zip(w, Hs))          # Σ w_j H_j H1 H_j
    L = sum(wj * H1 @ H @ H1 @ H for wj, H in zip(w, Hs))     # Σ w_j H1 H_j H1 H_j
    R = sum(wj * H @ H1 @ H @ H1 for wj, H in zip(w, Hs))     # Σ w_j H_j H1 H_j H1
    P2, P3 = H1 @ H1, H1 @ H1 @ H1
    P4 = P3 @ H1
    Y = [
        H1 / 2,
        P2 / 8,
        (P3 / 24 - H1 @ H2 / 12 - H2 @ H1 / 12 + S / 6) / 2,
        (P4 / 192 - P2 @ H2 / 48 - H1 @ H2 @ H1 / 24 - H2 @ P2 / 48 + L / 24 + R / 24) / 2,
    ]
    X = [
        H1,
        P2 / 2,
        (P3 - H1 @ H2 / 2 - H2 @ H1 / 2 + S) / 6,
        (P4 - P2 @ H2 - 2 * H1 @ H2 @ H1 - H2 @ P2 + 2 * L + 2 * R) / 24,
    ]
    return [hermitize(x) for x in X], [hermitize(y) for y in Y]


def fourth_order_trace_defect(H_list: Sequence, weights=None) -> dict:
    """Two expressions for ``Tr X_4 - Tr (H^{(1)})^4 / 24``.

    ``trace_form`` is ``(1/24)(-4 Tr H1² H2 + 4 Σ w_j Tr H1 H_j H1 H_j)``;
    ``commutator_form`` is ``-(1/12) Σ w_j ‖[H1, H_j]‖_F²``.  They agree,
    and vanish exactly when every ``H_j`` commutes with ``H1``.
    """
    Hs, w = _setup(H_list, weights)
    H1 = sum(wj * H for wj, H in zip(w, Hs))
    H2 = sum(wj * H @ H for wj, H in zip(w, Hs))
    t1 = np.trace(H1 @ H1 @ H2).real
    t2 = sum(wj * np.trace(H1 @ H @ H1 @ H).real for wj, H in zip(w, Hs))
    comm = sum(wj * commutator_norm(H1, H) ** 2 for wj, H in zip(w, Hs))
    return {"trace_form": float((-4 * t1 + 4 * t2) / 24),
            "commutator_form": float(-comm / 12),
            "commutator_sum": float(comm)}


@dataclass(frozen=True)
class FiniteDifferenceResult:
    coefficients: list = field(repr=False)   # X̂_1..X̂_K
    error_estimates: list
    h: float


def _central(f, k: int, h: float):
    """Second-order central difference for the ``k``-th derivative; ``f(i)`` is the sample at ``i*h``."""
    if k == 1:
        return (f(1) - f(-1)) / (2 * h)
    if k == 2:
        return (f(1) - 2 * f(0) + f(-1)) / h**2
    if k == 3:
        return (f(2) - 2 * f(1) + 2 * f(-1) - f(-2)) / (2 * h**3)
    return (f(2) - 4 * f(1) + 6 * f(0) - 4 * f(-1) + f(-2)) / h**4


def finite_difference_taylor(H_list: Sequence, weights=None, K: int = 3, h: float = 0.01,
                             tol: float = 1e-14) -> FiniteDifferenceResult:
    """Estimate ``X_1..X_K`` (``K <= 4``) by differentiating the Karcher solver.

    Central differences at steps ``h`` and ``2h`` are combined by Richardson
    extrapolation; the error estimate is the Frobenius size of that
    correction.
    """
    if not 1 <= K <= 4:
        raise ValueError(f"order must lie in 1..4, got {K}")
    Hs, w = _setup(H_list, weights)
    eigs = [hermitian_eig(H) for H in Hs]
    samples = {}
    for i in (0, 1, -1, 2, -2, 4, -4):
        t = i * h
        As = [hermitize((U * np.exp(t * lam)) @ U.conj().T) for lam, U in eigs]
        samples[i] = karcher_mean(As, w, tol=tol).mean if i else np.eye(Hs[0].shape[0], dtype=complex)
    coefs, errs = [], []
    for k in range(1, K + 1):
        Dh = _central(lambda i: samples[i], k, h)
        D2h = _central(lambda i: samples[2 * i], k, 2 * h)
        D = (4 * Dh - D2h) / 3
        fk = math.factorial(k)
        coefs.append(hermitize(D / fk))
        errs.append(float(np.linalg.norm(D - Dh)) / fk)
    return FiniteDifferenceResult(coefs, errs, h)


@dataclass
class EqualityCaseReport:
    """Verdicts for the equivalent equality conditions, with the raw quantities.

    (a) every ``A_j`` commutes with the Log-Euclidean mean;
    (b) ``G(A^t) = LE(A^t)`` at the probe points ``t``;
    (c) ``‖G(A^t)‖ = ‖LE(A^t)‖`` at ``t_probe``;
    (d) ``‖G(A^t)^{1/t}‖ = ‖LE(A)‖`` at ``t_probe``;
    (e) whether ``t -> ‖G(A^t)^{1/t}‖`` fails to be strictly decreasing on a
        log grid.  This is numerical evidence only.
    """

    a: bool
    b: bool
    c: bool
    d: bool
    e_not_strictly_decreasing: bool
    values: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.a == self.b == self.c == self.d

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d,
                "e_not_strictly_decreasing": self.e_not_strictly_decreasing,
                "consistent": self.consistent, **self.values}


def equality_case_check(A_list: Sequence, weights=None, norm="trace", t_probe: float = 1.0,
                        eq_tol: float = EQ_TOL, grid=None, **karcher_kw) -> EqualityCaseReport:
    """Evaluate the equality conditions for the Karcher / Log-Euclidean norm inequality.

    Norm comparisons in (c), (d) and the (e) probe are relative to the size
    of the compared quantities.

    Raises
    ------
    PreconditionError
        If the norm is not strictly increasing.
    """
    norm = parse_norm(norm)
    if not norm.strictly_increasing:
        raise PreconditionError(f"{norm} is not a strictly increasing norm")
    if t_probe == 0:
        raise ValueError("t_probe must be non-zero")
    As = [np.asarray(A, dtype=complex) for A in A_list]
    w = check_weights(weights, len(As))
    logs = [logm(as_psd(A)) for A in As]
    for A in As:
        _pd_eig(A)

    def powers(t):
        return [expmh(t * L) for L in logs]

    def G(t):
        return karcher_mean(powers(t), w, **karcher_kw).mean

    def fpow(M, e):
        lam, U = _pd_eig(M)
        return hermitize((U * lam**e) @ U.conj().T)

    LE = log_euclidean_mean(As, w)
    scale = max(np.linalg.norm(A) for A in As) * np.linalg.norm(LE)
    comm = max(commutator_norm(A, LE) for A in As)
    a = comm <= eq_tol * scale

    dists = {}
    for t in sorted({1.0, -1.0, t_probe, -t_probe}):
        dists[t] = riemannian_distance(G(t), log_euclidean_mean(powers(t), w))
    b = max(dists.values()) <= eq_tol

    Gt = G(t_probe)
    nG, nLE = norm(Gt), norm(log_euclidean_mean(powers(t_probe), w))
    c = abs(nG - nLE) <= eq_tol * nLE
    nGroot, nLE1 = norm(fpow(Gt, 1.0 / t_probe)), norm(LE)
    d = abs(nGroot - nLE1) <= eq_tol * nLE1

    grid = np.geomspace(0.1, 4.0, 12) if grid is None else np.asarray(grid, dtype=float)
    f = [norm(fpow(G(t), 1.0 / t)) for t in grid]
    drops = [(u - v) / u for u, v in zip(f, f[1:])]
    e = any(dr <= eq_tol for dr in drops)

    values = {
        "norm": str(norm), "t_probe": t_probe, "eq_tol": eq_tol,
        "max_commutator": comm, "commutator_scale": scale,
        "distances": {f"{t:g}": v for t, v in dists.items()},
        "norm_G_t": nG, "norm_LE_t": nLE, "norm_G_root": nGroot, "norm_LE": nLE1,
        "probe_grid": [float(t) for t in grid], "probe_values": f,
        "probe_relative_drops": drops,
    }
    return EqualityCaseReport(bool(a), bool(b), bool(c), bool(d), bool(e), values)


@dataclass
class LieTrotterResult:
    target: np.ndarray = field(repr=False)
    limit_estimate: np.ndarray = field(repr=False)
    rows: list = field(default_factory=list)      # (t, error)
    meet_rank: int = 0

    @property
    def decreasing(self) -> bool:
        """Strictly decreasing errors, where an error that has underflowed to 0 may stay 0."""
        errs = [e for _, e in self.rows]
        return all(v < u or u == v == 0.0 for u, v in zip(errs, errs[1:]))

    def to_dict(self) -> dict:
        return {"rows": [{"t": t, "error": e} for t, e in self.rows],
                "decreasing": self.decreasing, "meet_rank": self.meet_rank}


def lie_trotter_kato(A, B, ts: Sequence[float]) -> LieTrotterResult:
    """Errors of ``(A^{t/2} B^t A^{t/2})^{1/t}`` against its ``t -> 0`` limit.

    The limit is ``P exp(P (log A) P + P (log B) P)`` where ``P`` is the meet
    of the support projections and the logarithms are taken on supports.
    """
    A, B = as_psd(A), as_psd(B)
    if A.shape != B.shape:
        raise ValueError("A and B must have the same dimension")
    ts = [float(t) for t in ts]
    if any(t <= 0 for t in ts):
        raise ValueError("t values must be positive")
    P = projection_meet(support_projection(A), support_projection(B))
    rank = int(round(np.trace(P).real))
    if rank == 0:
        target = np.zeros_like(P)
    else:
        M = hermitize(P @ (logm(A, zero=0.0) + logm(B, zero=0.0)) @ P)
        target = hermitize(P @ expmh(M) @ P)
    rows, est = [], None
    for t in ts:
        Ah = powm(A, t / 2)
        est = powm(hermitize(Ah @ powm(B, t) @ Ah), 1.0 / t)
        rows.append((t, float(np.linalg.norm(est - target))))
    return LieTrotterResult(target, est, rows, rank)
