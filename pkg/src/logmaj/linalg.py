"""Dense complex linear algebra for small Hermitian / positive semidefinite matrices.

Everything here works on plain ``numpy`` arrays.  Positive semidefinite
inputs are handled through their spectral decomposition, with the
generalized functional calculus used throughout the package: functions are
applied on the support of a matrix and kernel eigenvalues are sent to a
fixed value (``0`` unless stated otherwise).  In particular ``0**p = 0`` for
every real or complex ``p``, so ``powm(A, 0)`` is the support projection and
``powm(A, -1)`` the generalized inverse.

The notion of "kernel" depends on ``RANK_TOL``: an eigenvalue ``lam`` of a
PSD matrix is treated as zero when ``lam <= RANK_TOL * lam_max``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

RANK_TOL = 1e-12
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 50
MEET_TOL = 1e-10

EIG_METHODS = ("lapack", "jacobi")


class DomainError(ValueError):
    """A matrix function was asked for a value outside its domain."""


class PreconditionError(ValueError):
    """Inputs violate a hypothesis the routine refuses to extrapolate past."""


class ConvergenceError(RuntimeError):
    """An iterative routine stopped before reaching its tolerance.

    ``history`` carries whatever diagnostic trace the routine recorded
    (residuals, off-diagonal norms, ...).
    """

    def __init__(self, message: str, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


# ---------------------------------------------------------------------------
# construction and validation


def as_matrix(X) -> np.ndarray:
    """Return ``X`` as a finite square complex array."""
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix has non-finite entries")
    return X


def hermitize(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.conj().T)


def as_hermitian(A, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate ``A`` as Hermitian and return its exact symmetrization."""
    A = as_matrix(A)
    skew = np.linalg.norm(A - A.conj().T)
    if skew > tol * (1.0 + np.linalg.norm(A)):
        raise ValueError(f"matrix is not Hermitian (||A - A*||_F = {skew:.3e})")
    return hermitize(A)


def as_psd(A, tol: float = PSD_TOL, method: str = "lapack") -> np.ndarray:
    """Validate ``A`` as positive semidefinite and return it symmetrized."""
    A = as_hermitian(A)
    w, _ = hermitian_eig(A, method=method)
    if w[-1] < -tol * max(1.0, abs(w[0])):
        raise ValueError(f"matrix is not positive semidefinite (lambda_min = {w[-1]:.3e})")
    return A


def as_pd(A, floor: float = 0.0, method: str = "lapack") -> np.ndarray:
    """Validate ``A`` as positive definite (all eigenvalues > ``floor``)."""
    A = as_hermitian(A)
    w, _ = hermitian_eig(A, method=method)
    if w[-1] <= floor or w[-1] <= RANK_TOL * w[0]:
        raise DomainError(f"matrix is not positive definite (lambda_min = {w[-1]:.3e})")
    return A


# ---------------------------------------------------------------------------
# eigensolvers


def jacobi_eigh(A, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigensolver for complex Hermitian matrices.

    Each rotation first removes the phase of the pivot ``a_pq`` with a
    diagonal unitary and then applies the real symmetric Jacobi rotation,
    so the combined 2x2 unitary annihilates ``a_pq``.  Sweeps stop once
    ``off(A) <= tol * ||A||_F``.

    Parameters
    ----------
    A : ndarray, shape (m, m)
        Hermitian matrix.
    tol : float
        Relative threshold on the off-diagonal Frobenius norm.
    max_sweeps : int
        Maximum number of full cyclic sweeps.

    Returns
    -------
    w : ndarray, shape (m,)
        Eigenvalues in decreasing order.
    U : ndarray, shape (m, m)
        Unitary matrix with ``A = U diag(w) U*``.

    Raises
    ------
    ConvergenceError
        If the off-diagonal norm is still above threshold after
        ``max_sweeps`` sweeps; ``history`` holds the per-sweep off norms.
    """
    a = hermitize(as_matrix(A)).copy()
    m = a.shape[0]
    v = np.eye(m, dtype=complex)
    scale = np.linalg.norm(a)
    history = []
    if m > 1 and scale > 0.0:
        iu = np.triu_indices(m, 1)
        for _ in range(max_sweeps + 1):
            off = math.sqrt(2.0) * np.linalg.norm(a[iu])
            history.append(off)
            if off <= tol * scale:
                break
            if len(history) > max_sweeps:
                raise ConvergenceError(
                    f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})",
                    history,
                )
            for p in range(m - 1):
                for q in range(p + 1, m):
                    apq = a[p, q]
                    mag = abs(apq)
                    if mag == 0.0:
                        continue
                    phase = apq / mag
                    tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                    idx = [p, q]
                    a[:, idx] = a[:, idx] @ g
                    a[idx, :] = g.conj().T @ a[idx, :]
                    v[:, idx] = v[:, idx] @ g
                    a[p, q] = a[q, p] = 0.0
                    a[p, p] = a[p, p].real
                    a[q, q] = a[q, q].real
    w = np.real(np.diag(a)).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def hermitian_eig(A, method: str = "lapack"):
    """Eigendecomposition ``A = U diag(w) U*`` with ``w`` decreasing.

    ``method="lapack"`` calls ``numpy.linalg.eigh``; ``method="jacobi"``
    uses :func:`jacobi_eigh`.  Both return the same contract.
    """
    A = as_matrix(A)
    if method == "lapack":
        w, U = np.linalg.eigh(hermitize(A))
        return w[::-1].copy(), U[:, ::-1].copy()
    if method == "jacobi":
        return jacobi_eigh(A)
    raise ValueError(f"unknown eigen method {method!r}; choose from {EIG_METHODS}")


def eigvalsh(A) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, decreasing."""
    return np.linalg.eigvalsh(hermitize(as_matrix(A)))[::-1].copy()


def from_eig(U: np.ndarray, fw: np.ndarray) -> np.ndarray:
    """Assemble ``U diag(fw) U*``."""
    return (U * fw) @ U.conj().T


def kernel_mask(w: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Boolean mask of eigenvalues treated as zero for a PSD spectrum."""
    top = max(float(np.max(w)), 0.0) if w.size else 0.0
    return w <= rank_tol * top


# ---------------------------------------------------------------------------
# functional calculus


def matrix_function(
    A,
    f: Callable[[np.ndarray], np.ndarray],
    zero: float | None = 0.0,
    rank_tol: float = RANK_TOL,
    method: str = "lapack",
) -> np.ndarray:
    """Apply ``f`` to a PSD matrix through its spectral decomposition.

    ``f`` is evaluated on the positive eigenvalues only.  Kernel
    eigenvalues are mapped to ``zero``; with ``zero=None`` the routine
    evaluates ``f(0)`` instead and raises :class:`DomainError` if that is
    not finite (e.g. ``log`` on a singular matrix).
    """
    w, U = hermitian_eig(A, method=method)
    ker = kernel_mask(w, rank_tol)
    fw = np.empty_like(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        fw[~ker] = f(w[~ker])
        if np.any(ker):
            if zero is None:
                f0 = f(np.zeros(int(ker.sum())))
                if not np.all(np.isfinite(f0)):
                    raise DomainError("function is undefined at a zero eigenvalue")
                fw[ker] = f0
            else:
                fw[ker] = zero
    if not np.all(np.isfinite(fw)):
        raise DomainError("function is undefined on the spectrum")
    return hermitize(from_eig(U, fw))


def hermitian_function(H, f: Callable[[np.ndarray], np.ndarray], method: str = "lapack") -> np.ndarray:
    """Apply ``f`` to every eigenvalue of a Hermitian matrix (no kernel rule)."""
    w, U = hermitian_eig(H, method=method)
    return hermitize(from_eig(U, f(w)))


def powm(A, p: float, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Generalized real power of a PSD matrix, ``0**p = 0`` for all ``p``."""
    return matrix_function(A, lambda x: x**p, zero=0.0, rank_tol=rank_tol)


def sqrtm(A) -> np.ndarray:
    return powm(A, 0.5)


def pinvh(A) -> np.ndarray:
    """Generalized inverse of a PSD matrix (inverse on its support)."""
    return powm(A, -1.0)


def logm(A, zero: float | None = None) -> np.ndarray:
    """Matrix logarithm of a PSD matrix.

    With the default ``zero=None`` a singular input raises
    :class:`DomainError`; pass ``zero=0.0`` for the log taken on the support.
    """
    return matrix_function(A, np.log, zero=zero)


def expmh(H) -> np.ndarray:
    """Exponential of a Hermitian matrix."""
    return hermitian_function(H, np.exp)


def complex_power(A, z: complex, rank_tol: float = RANK_TOL) -> np.ndarray:
    """``A**z`` for PSD ``A`` and complex ``z`` with ``0**z = 0``.

    The result is normal but in general not Hermitian.
    """
    w, U = hermitian_eig(A)
    ker = kernel_mask(w, rank_tol)
    fw = np.zeros(w.shape, dtype=complex)
    fw[~ker] = np.exp(complex(z) * np.log(w[~ker]))
    return from_eig(U, fw)


# ---------------------------------------------------------------------------
# singular values and unitarily invariant norms


def singular_values(X) -> np.ndarray:
    """Singular values in decreasing order."""
    return np.linalg.svd(as_matrix(X), compute_uv=False)


def schatten_from_sv(s: np.ndarray, p: float) -> float:
    if p == math.inf:
        return float(s[0]) if s.size else 0.0
    if p < 1:
        raise ValueError(f"Schatten index must be >= 1, got {p}")
    return float(np.sum(s**p) ** (1.0 / p))


def schatten_norm(X, p: float) -> float:
    """Schatten ``p``-norm ``(Tr |X|^p)^(1/p)``; ``p = inf`` is the operator norm."""
    if p < 1:
        raise ValueError(f"Schatten index must be >= 1, got {p}")
    return schatten_from_sv(singular_values(X), p)


def operator_norm(X) -> float:
    return schatten_norm(X, math.inf)


def ky_fan_norm(X, k: int) -> float:
    """Sum of the ``k`` largest singular values."""
    s = singular_values(X)
    if not 1 <= k <= s.size:
        raise ValueError(f"Ky Fan index must lie in 1..{s.size}, got {k}")
    return float(np.sum(s[:k]))


def ky_fan_products(X) -> np.ndarray:
    """Partial products ``prod_{i<=k} s_i(X)`` for ``k = 1..m``."""
    return np.cumprod(singular_values(X))


# ---------------------------------------------------------------------------
# projections and commutators


def support_projection(A, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthogonal projection onto the range of a PSD matrix."""
    w, U = hermitian_eig(A)
    keep = ~kernel_mask(w, rank_tol) if np.max(w) > 0 else np.zeros(w.shape, bool)
    V = U[:, keep]
    return hermitize(V @ V.conj().T)


def projection_meet(P, Q, tol: float = MEET_TOL) -> np.ndarray:
    """Projection onto ``range(P) ∩ range(Q)`` for orthogonal projections.

    A unit vector lies in both ranges iff it is an eigenvector of ``P + Q``
    for the eigenvalue 2, so the meet is the spectral projection of
    ``P + Q`` for eigenvalues within ``tol`` of 2.
    """
    w, U = hermitian_eig(as_hermitian(P) + as_hermitian(Q))
    V = U[:, w >= 2.0 - tol]
    return hermitize(V @ V.conj().T)


def commutator(A, B) -> np.ndarray:
    return A @ B - B @ A


def commutator_norm(A, B) -> float:
    """Frobenius norm of ``AB - BA``."""
    return float(np.linalg.norm(commutator(np.asarray(A), np.asarray(B))))


def direct_sum(*blocks) -> np.ndarray:
    """Block-diagonal matrix ``B_1 ⊕ B_2 ⊕ ...``."""
    blocks = [as_matrix(b) for b in blocks]
    m = sum(b.shape[0] for b in blocks)
    out = np.zeros((m, m), dtype=complex)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i : i + k, i : i + k] = b
        i += k
    return out
