"""Majorization verdicts, compound matrices and Araki-type eigenvalue checks."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .linalg import (
    RANK_TOL,
    PreconditionError,
    as_matrix,
    as_psd,
    commutator_norm,
    eigvalsh,
    hermitize,
    powm,
    singular_values,
    support_projection,
)
from .norms import Norm, parse_norm


@dataclass(frozen=True)
class MajorizationReport:
    """Outcome of a majorization comparison ``a ≺ b``.

    ``margins[k-1]`` is the b-side minus the a-side of the k-th partial
    sum (``kind="weak"``/``"additive"``) or of the k-th partial sum of logs
    (``kind="log"``); it is ``+inf``/``-inf`` when exactly one of the two
    partial products vanishes.
    """

    kind: str
    margins: np.ndarray = field(repr=False)
    final_equality_gap: float
    holds: bool
    tol: float
    det_tol: float

    @property
    def worst_margin(self) -> float:
        """Smallest partial margin (excluding the final identity for log/additive kinds)."""
        body = self.margins if self.kind == "weak" else self.margins[:-1]
        return float(np.min(body)) if body.size else math.inf

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "margins": [_json_float(x) for x in self.margins],
            "final_equality_gap": _json_float(self.final_equality_gap),
            "holds": bool(self.holds),
            "tol": self.tol,
            "det_tol": self.det_tol,
        }


def _json_float(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return "+inf" if x > 0 else ("-inf" if x < 0 else "nan")


def decreasing_rearrangement(a) -> np.ndarray:
    """Sort a real vector in non-increasing order."""
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("entries must be finite")
    return np.sort(a)[::-1].copy()


def _pair(a, b):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise ValueError("empty vectors")
    return a, b


def check_log_majorization(a, b, tol: float = 1e-9, det_tol: float | None = None,
                           zero_tol: float = RANK_TOL) -> MajorizationReport:
    """Decide ``a ≺_log b`` for nonnegative vectors.

    Entries below ``zero_tol * max(a, b)`` count as exact zeros.  Zero counts
    are compared before any logarithm is taken, so no ``-inf`` arithmetic
    happens: a partial product that vanishes on one side only yields an
    infinite margin, and the determinant identity holds when both totals
    vanish or when their logs agree within ``det_tol``.
    """
    a, b = _pair(a, b)
    det_tol = tol if det_tol is None else det_tol
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), 0.0)
    floor = zero_tol * scale
    if np.min(a) < -max(floor, 1e-300) or np.min(b) < -max(floor, 1e-300):
        raise ValueError("log-majorization needs nonnegative entries")
    a = decreasing_rearrangement(np.clip(a, 0.0, None))
    b = decreasing_rearrangement(np.clip(b, 0.0, None))
    m = a.size
    pos_a = int(np.sum(a > floor))
    pos_b = int(np.sum(b > floor))
    la = np.cumsum(np.log(a[:pos_a]))
    lb = np.cumsum(np.log(b[:pos_b]))
    margins = np.empty(m)
    for i in range(m):
        a_zero = i >= pos_a
        b_zero = i >= pos_b
        if a_zero and b_zero:
            margins[i] = 0.0
        elif a_zero:
            margins[i] = math.inf
        elif b_zero:
            margins[i] = -math.inf
        else:
            margins[i] = lb[i] - la[i]
    final = float(margins[-1])
    holds = bool(np.all(margins[:-1] >= -tol) and abs(final) <= det_tol)
    return MajorizationReport("log", margins, final, holds, tol, det_tol)


def check_weak_majorization(a, b, tol: float = 1e-9) -> MajorizationReport:
    """Decide ``a ≺_w b``: every partial sum of ``b↓`` dominates that of ``a↓``."""
    a, b = _pair(a, b)
    margins = np.cumsum(decreasing_rearrangement(b)) - np.cumsum(decreasing_rearrangement(a))
    holds = bool(np.all(margins >= -tol))
    return MajorizationReport("weak", margins, float(margins[-1]), holds, tol, tol)


def check_majorization(a, b, tol: float = 1e-9, det_tol: float | None = None) -> MajorizationReport:
    """Decide ``a ≺ b``: weak majorization plus equal totals."""
    a, b = _pair(a, b)
    det_tol = tol if det_tol is None else det_tol
    margins = np.cumsum(decreasing_rearrangement(b)) - np.cumsum(decreasing_rearrangement(a))
    final = float(margins[-1])
    holds = bool(np.all(margins[:-1] >= -tol) and abs(final) <= det_tol)
    return MajorizationReport("additive", margins, final, holds, tol, det_tol)


def compound_matrix(A, k: int) -> np.ndarray:
    """k-th antisymmetric tensor power (k-th compound) of ``A``.

    Entry ``(I, J)`` is the minor ``det A[I, J]`` with ``I`` and ``J``
    running over increasing k-tuples in lexicographic order.
    """
    A = as_matrix(A)
    m = A.shape[0]
    if not 1 <= k <= m:
        raise ValueError(f"compound order must lie in 1..{m}, got {k}")
    if k == 1:
        return A.copy()
    idx = np.array(list(itertools.combinations(range(m), k)))
    rows = idx[:, None, :, None]
    cols = idx[None, :, None, :]
    return np.linalg.det(A[rows, cols])


class SpectralComparison(NamedTuple):
    lhs: np.ndarray
    rhs: np.ndarray
    report: MajorizationReport


class NormComparison(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


class EqualityProbe(NamedTuple):
    gap: float
    commutator_norm: float


class Convention(str, enum.Enum):
    """How ``A**0`` and the scalar ``0**0`` are read at the endpoints θ ∈ {0, 1}.

    ``IDENTITY``: ``A**0 = I`` and ``0**0 = 1``.
    ``SUPPORT``: ``A**0`` is the support projection and ``0**0 = 0``.
    """

    IDENTITY = "identity"
    SUPPORT = "support"


def _clean(x: np.ndarray) -> np.ndarray:
    """Clip to nonnegative and zero out entries below ``RANK_TOL`` times the largest.

    Roundoff-level kernel values would otherwise survive fractional powers
    (``(1e-17)**0.25`` is about ``6e-5``).
    """
    x = np.clip(np.asarray(x, dtype=float), 0.0, None)
    top = float(np.max(x)) if x.size else 0.0
    return np.where(x > RANK_TOL * top, x, 0.0)


def _psd_eigvals(M) -> np.ndarray:
    return _clean(eigvalsh(M))


def _svals(X) -> np.ndarray:
    return _clean(singular_values(X))


def _spow(x: np.ndarray, e: float, convention: Convention) -> np.ndarray:
    """Entrywise ``x**e`` for nonnegative ``x`` with the endpoint convention."""
    if e != 0:
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = x[pos] ** e
        return out
    if convention is Convention.IDENTITY:
        return np.ones_like(x)
    top = float(np.max(x)) if x.size else 0.0
    return (x > RANK_TOL * top).astype(float)


def _mpow(A, e: float, convention: Convention) -> np.ndarray:
    if e != 0:
        return powm(A, e)
    if convention is Convention.IDENTITY:
        return np.eye(A.shape[0], dtype=complex)
    return support_projection(A)


def araki_pair(A, B, p: float, tol: float = 1e-9, det_tol: float | None = None) -> SpectralComparison:
    """Eigenvalues of ``A^{p/2} B^p A^{p/2}`` against those of ``(A^{1/2} B A^{1/2})^p``.

    The report decides ``lhs ≺_log rhs``, which is expected for ``0 < p <= 1``.
    """
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    A, B = as_psd(A), as_psd(B)
    Ah = powm(A, p / 2)
    lhs = _psd_eigvals(hermitize(Ah @ powm(B, p) @ Ah))
    R = powm(A, 0.5)
    rhs = _spow(_psd_eigvals(hermitize(R @ B @ R)), p, Convention.IDENTITY)
    return SpectralComparison(lhs, rhs, check_log_majorization(lhs, rhs, tol, det_tol))


def commute_tol(A1, A2) -> float:
    return 1e-10 * (1.0 + np.linalg.norm(A1) * np.linalg.norm(A2))


def _require_commuting(X1, X2, label: str) -> None:
    c = commutator_norm(X1, X2)
    if c > commute_tol(X1, X2):
        raise PreconditionError(f"{label} do not commute (||[{label}]||_F = {c:.3e})")


def _geometric_products(A1, A2, B1, B2, theta, convention):
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    convention = Convention(convention)
    A1, A2, B1, B2 = (as_psd(X) for X in (A1, A2, B1, B2))
    _require_commuting(A1, A2, "A1,A2")
    _require_commuting(B1, B2, "B1,B2")
    At = hermitize(_mpow(A1, theta, convention) @ _mpow(A2, 1 - theta, convention))
    Bt = hermitize(_mpow(B1, theta, convention) @ _mpow(B2, 1 - theta, convention))
    return convention, (A1, A2, B1, B2), At, Bt


def extended_araki(A1, A2, B1, B2, theta: float, convention: str | Convention = Convention.IDENTITY,
                   tol: float = 1e-9, det_tol: float | None = None) -> SpectralComparison:
    """Two-pair extension of Araki's log-majorization for commuting pairs.

    With ``A_θ = A1^θ A2^{1-θ}`` and ``B_θ = B1^θ B2^{1-θ}`` the left side
    is ``λ(A_θ^{1/2} B_θ A_θ^{1/2})`` and the right side the entrywise
    product ``λ^θ(A1^{1/2} B1 A1^{1/2}) λ^{1-θ}(A2^{1/2} B2 A2^{1/2})``.

    Raises
    ------
    PreconditionError
        If ``A1, A2`` or ``B1, B2`` fail to commute within
        ``1e-10 (1 + ||X1||_F ||X2||_F)``.
    """
    convention, (A1, A2, B1, B2), At, Bt = _geometric_products(A1, A2, B1, B2, theta, convention)
    R = powm(At, 0.5)
    lhs = _psd_eigvals(hermitize(R @ Bt @ R))
    R1, R2 = powm(A1, 0.5), powm(A2, 0.5)
    l1 = _psd_eigvals(hermitize(R1 @ B1 @ R1))
    l2 = _psd_eigvals(hermitize(R2 @ B2 @ R2))
    rhs = _spow(l1, theta, convention) * _spow(l2, 1 - theta, convention)
    return SpectralComparison(lhs, rhs, check_log_majorization(lhs, rhs, tol, det_tol))


def extended_araki_singular_values(A1, A2, B1, B2, theta: float,
                                   convention: str | Convention = Convention.IDENTITY,
                                   tol: float = 1e-9) -> SpectralComparison:
    """Singular-value form: ``s(A_θ B_θ)`` against ``s^θ(A1 B1) s^{1-θ}(A2 B2)``."""
    convention, (A1, A2, B1, B2), At, Bt = _geometric_products(A1, A2, B1, B2, theta, convention)
    lhs = _svals(At @ Bt)
    rhs = _spow(_svals(A1 @ B1), theta, convention) * _spow(_svals(A2 @ B2), 1 - theta, convention)
    return SpectralComparison(lhs, rhs, check_log_majorization(lhs, rhs, tol))


def _scalar_pow(x: float, e: float, convention: Convention) -> float:
    return float(_spow(np.array([x]), e, convention)[0]) if e == 0 else x**e


def extended_araki_norm_check(A1, A2, B1, B2, theta: float, r: float, norm: str | Norm = "trace",
                              convention: str | Convention = Convention.IDENTITY,
                              tol: float = 1e-9) -> NormComparison:
    """Unitarily invariant norm inequality for the two commuting pairs.

    Compares ``‖ |A_θ B_θ|^r ‖`` with ``‖ |A1 B1|^r ‖^θ ‖ |A2 B2|^r ‖^{1-θ}``;
    ``holds`` allows a relative slack ``tol (1 + rhs)``.
    """
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    norm = parse_norm(norm)
    convention, (A1, A2, B1, B2), At, Bt = _geometric_products(A1, A2, B1, B2, theta, convention)
    lhs = norm.from_singular_values(_svals(At @ Bt) ** r)
    n1 = norm.from_singular_values(_svals(A1 @ B1) ** r)
    n2 = norm.from_singular_values(_svals(A2 @ B2) ** r)
    rhs = _scalar_pow(n1, theta, convention) * _scalar_pow(n2, 1 - theta, convention)
    return NormComparison(lhs, rhs, bool(lhs <= rhs + tol * (1.0 + rhs)))


def araki_power_norm(A, B, p: float, norm: str | Norm = "trace") -> float:
    """``‖ (A^{p/2} B^p A^{p/2})^{1/p} ‖`` for PSD ``A, B`` and ``p > 0``."""
    norm = parse_norm(norm)
    Ah = powm(A, p / 2)
    lam = _psd_eigvals(hermitize(Ah @ powm(B, p) @ Ah))
    return norm.from_singular_values(lam ** (1.0 / p))


def araki_equality_probe(A, B, p: float, q: float, norm: str | Norm = "trace") -> EqualityProbe:
    """Gap ``N(q) - N(p)`` of the increasing map ``p -> ‖(A^{p/2}B^pA^{p/2})^{1/p}‖``.

    For a strictly increasing norm the gap vanishes only when ``A`` and
    ``B`` commute; the commutator norm is returned alongside for
    correlation.
    """
    norm = parse_norm(norm)
    if not norm.strictly_increasing:
        raise ValueError(f"norm {norm} is not strictly increasing")
    if not 0 < p < q:
        raise ValueError(f"need 0 < p < q, got p={p}, q={q}")
    A, B = as_psd(A), as_psd(B)
    gap = araki_power_norm(A, B, q, norm) - araki_power_norm(A, B, p, norm)
    return EqualityProbe(float(gap), commutator_norm(A, B))
