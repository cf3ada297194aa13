"""α-z-Rényi divergences of positive semidefinite matrices.

Powers follow the generalized functional calculus: ``σ^{-t}`` is the
power of the generalized inverse and ``σ^0`` the support projection.
Support containment ``ρ⁰ <= σ⁰`` is decided by ``‖(I - σ⁰) ρ⁰‖_∞ <= support_tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import (
    RANK_TOL,
    PreconditionError,
    as_psd,
    eigvalsh,
    from_eig,
    hermitian_eig,
    hermitize,
    kernel_mask,
)

SUPPORT_TOL = 1e-10
MONO_TOL = 1e-8

CONTAINED = "contained"
OVERLAP = "overlap"
ORTHOGONAL = "orthogonal"


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    finite: bool
    support_relation: str

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> dict:
        return {
            "value": self.value if self.finite else "+inf",
            "finite": self.finite,
            "support_relation": self.support_relation,
        }


INF = math.inf


class _Spectral:
    """Cached spectral decomposition of a PSD matrix for repeated powers."""

    def __init__(self, A):
        self.w, self.U = hermitian_eig(A)
        self.ker = kernel_mask(self.w)
        self.w = np.where(self.ker, 0.0, self.w)

    def power(self, e: float) -> np.ndarray:
        fw = np.zeros_like(self.w)
        pos = ~self.ker
        fw[pos] = self.w[pos] ** e
        return hermitize(from_eig(self.U, fw))

    def top(self, e: float) -> float:
        pos = self.w[~self.ker]
        return float(np.max(pos**e)) if pos.size else 0.0

    def log(self) -> np.ndarray:
        fw = np.zeros_like(self.w)
        pos = ~self.ker
        fw[pos] = np.log(self.w[pos])
        return hermitize(from_eig(self.U, fw))


class _Pair:
    """A (ρ, σ) pair with cached decompositions and support relation."""

    def __init__(self, rho, sigma, support_tol: float = SUPPORT_TOL):
        rho, sigma = as_psd(rho), as_psd(sigma)
        if rho.shape != sigma.shape:
            raise ValueError("rho and sigma must have the same dimension")
        self.trace = float(np.trace(rho).real)
        if self.trace <= 0:
            raise ValueError("rho must be non-zero")
        self.rho, self.sigma = rho, sigma
        self.r, self.s = _Spectral(rho), _Spectral(sigma)
        P, Q = self.r.power(0.0), self.s.power(0.0)
        eye = np.eye(rho.shape[0])
        if np.linalg.norm((eye - Q) @ P, 2) <= support_tol:
            self.relation = CONTAINED
        elif np.linalg.norm(Q @ P, 2) <= support_tol:
            self.relation = ORTHOGONAL
        else:
            self.relation = OVERLAP

    def q(self, alpha: float, z: float) -> DivergenceValue:
        if alpha < 0 or z <= 0:
            raise ValueError(f"need alpha >= 0 and z > 0, got alpha={alpha}, z={z}")
        if alpha > 1 and self.relation != CONTAINED:
            return DivergenceValue(INF, False, self.relation)
        if self.relation == ORTHOGONAL:
            return DivergenceValue(0.0, True, self.relation)
        a, b = alpha / (2 * z), (1 - alpha) / z
        Ra = self.r.power(a)
        lam = eigvalsh(Ra @ self.s.power(b) @ Ra)
        scale = self.r.top(a) ** 2 * self.s.top(b)
        lam = lam[lam > RANK_TOL * scale]
        return DivergenceValue(float(np.sum(lam**z)), True, self.relation)

    def umegaki(self) -> DivergenceValue:
        if self.relation != CONTAINED:
            return DivergenceValue(INF, False, self.relation)
        value = float(np.trace(self.rho @ (self.r.log() - self.s.log())).real)
        return DivergenceValue(value, True, self.relation)

    def d1(self) -> DivergenceValue:
        D = self.umegaki()
        if not D.finite:
            return D
        return DivergenceValue(D.value / self.trace, True, D.support_relation)

    def d(self, alpha: float, z: float) -> DivergenceValue:
        if alpha == 1:
            return self.d1()
        Q = self.q(alpha, z)
        if not Q.finite or Q.value <= 0.0:
            # Q = +inf for alpha > 1, Q = 0 for alpha < 1: both give +inf
            return DivergenceValue(INF, False, Q.support_relation)
        value = (math.log(Q.value) - math.log(self.trace)) / (alpha - 1)
        return DivergenceValue(value, True, Q.support_relation)


def support_relation(rho, sigma, support_tol: float = SUPPORT_TOL) -> str:
    """``"contained"`` if ρ⁰ <= σ⁰, ``"orthogonal"`` if ρ⁰ ⊥ σ⁰, else ``"overlap"``."""
    return _Pair(rho, sigma, support_tol).relation


def q_alpha_z(rho, sigma, alpha: float, z: float, support_tol: float = SUPPORT_TOL) -> DivergenceValue:
    """``Q_{α,z}(ρ‖σ) = Tr (ρ^{α/2z} σ^{(1-α)/z} ρ^{α/2z})^z``.

    Returns ``+inf`` when ``α > 1`` and the support of ρ is not contained
    in that of σ.
    """
    return _Pair(rho, sigma, support_tol).q(alpha, z)


def d_alpha_z(rho, sigma, alpha: float, z: float, support_tol: float = SUPPORT_TOL) -> DivergenceValue:
    """``D_{α,z}(ρ‖σ) = log(Q_{α,z} / Tr ρ) / (α - 1)``; ``α = 1`` gives the normalized relative entropy."""
    return _Pair(rho, sigma, support_tol).d(alpha, z)


def umegaki(rho, sigma, support_tol: float = SUPPORT_TOL) -> DivergenceValue:
    """Relative entropy ``Tr ρ (log ρ - log σ)``, logs taken on supports."""
    return _Pair(rho, sigma, support_tol).umegaki()


def d1_normalized(rho, sigma, support_tol: float = SUPPORT_TOL) -> DivergenceValue:
    """Relative entropy divided by ``Tr ρ``."""
    return _Pair(rho, sigma, support_tol).d1()


@dataclass
class ScanResult:
    """Rows ``(alpha, z, value, finite)`` in grid order plus verdicts.

    ``verdict`` is ``None`` when no monotonicity claim applies.
    """

    rows: list
    verdict: bool | None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rows": [
                {"alpha": a, "z": z, "value": v if f else "+inf", "finite": f}
                for a, z, v, f in self.rows
            ],
            "verdict": self.verdict,
            **self.details,
        }


def _monotone(values: Sequence[float], tol: float, increasing: bool = True) -> tuple[bool, float]:
    """Whether ``values`` is monotone within ``tol``; also the worst violation."""
    worst = 0.0
    ok = True
    for u, v in zip(values, values[1:]):
        if not increasing:
            u, v = v, u
        if math.isinf(u) and math.isinf(v):
            continue
        if math.isinf(v):
            continue
        if math.isinf(u):
            return False, INF
        drop = u - v
        if drop > tol * max(1.0, abs(u)):
            ok = False
        worst = max(worst, drop)
    return ok, worst


def _check_grid(alphas) -> list:
    alphas = [float(a) for a in alphas]
    if any(a < 0 for a in alphas) or any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alpha grid must be nonnegative and strictly increasing")
    return alphas


def alpha_monotonicity_scan(rho, sigma, z: float, alphas: Sequence[float], tol: float = MONO_TOL,
                            support_tol: float = SUPPORT_TOL) -> ScanResult:
    """Evaluate ``α -> D_{α,z}`` on a grid and test that it is non-decreasing.

    Also tests ``D_α <= D_1 <= D_α'`` for grid points ``α < 1 < α'``.
    """
    pair = _Pair(rho, sigma, support_tol)
    alphas = _check_grid(alphas)
    vals = [pair.d(a, z) for a in alphas]
    rows = [(a, z, v.value, v.finite) for a, v in zip(alphas, vals)]
    ok, worst = _monotone([v.value for v in vals], tol)
    d1 = pair.d1().value
    below = [v.value for a, v in zip(alphas, vals) if a < 1]
    above = [v.value for a, v in zip(alphas, vals) if a > 1]
    straddle = None
    if below or above:
        chain = ([max(below)] if below else []) + [d1] + ([min(above)] if above else [])
        straddle, _ = _monotone(chain, tol)
    return ScanResult(rows, ok and straddle is not False,
                      {"monotone": ok, "worst_drop": worst, "straddle": straddle,
                       "d1": d1 if math.isfinite(d1) else "+inf"})


def log_convexity_check(rho, sigma, z: float, alpha1: float, alpha2: float, thetas: Sequence[float],
                        tol: float = 1e-9, support_tol: float = SUPPORT_TOL) -> ScanResult:
    """Test ``Q_{θα1+(1-θ)α2} <= Q_{α1}^θ Q_{α2}^{1-θ}`` for each θ, with ``(+inf)^θ = +inf``.

    Rows are ``(theta, lhs, rhs, holds)``.

    Raises
    ------
    PreconditionError
        If the supports of ρ and σ are orthogonal.
    """
    pair = _Pair(rho, sigma, support_tol)
    if pair.relation == ORTHOGONAL:
        raise PreconditionError("supports of rho and sigma are orthogonal")
    q1, q2 = pair.q(alpha1, z).value, pair.q(alpha2, z).value

    def factor(q, e):
        return 1.0 if e == 0 else (INF if math.isinf(q) else q**e)

    rows = []
    for th in thetas:
        if not 0 <= th <= 1:
            raise ValueError(f"theta must lie in [0, 1], got {th}")
        lhs = pair.q(th * alpha1 + (1 - th) * alpha2, z).value
        rhs = factor(q1, th) * factor(q2, 1 - th)
        holds = math.isinf(rhs) or lhs <= rhs + tol * (1.0 + rhs)
        rows.append((th, lhs, rhs, bool(holds)))
    return ScanResult(rows, all(r[3] for r in rows))


def z_monotonicity_scan(rho, sigma, alpha: float, zs: Sequence[float], tol: float = MONO_TOL,
                        support_tol: float = SUPPORT_TOL) -> ScanResult:
    """Evaluate ``z -> D_{α,z}``: non-decreasing for ``0 < α < 1``, non-increasing for ``α > 1``.

    The verdict is ``None`` at ``α = 0`` where no direction is claimed.
    """
    if alpha == 1:
        raise ValueError("alpha = 1 does not depend on z")
    zs = [float(z) for z in zs]
    if any(z <= 0 for z in zs) or any(b <= a for a, b in zip(zs, zs[1:])):
        raise ValueError("z grid must be positive and strictly increasing")
    pair = _Pair(rho, sigma, support_tol)
    vals = [pair.d(alpha, z) for z in zs]
    rows = [(alpha, z, v.value, v.finite) for z, v in zip(zs, vals)]
    if alpha == 0:
        return ScanResult(rows, None, {"direction": None})
    increasing = alpha < 1
    ok, worst = _monotone([v.value for v in vals], tol, increasing)
    return ScanResult(rows, ok, {"direction": "increasing" if increasing else "decreasing",
                                 "worst_violation": worst})


def line_scan(rho, sigma, kappa: float, z0: float, alphas: Sequence[float], tol: float = MONO_TOL,
              support_tol: float = SUPPORT_TOL) -> ScanResult:
    """Evaluate ``α -> D_{α, κα + z0}``.

    Monotonicity is only claimed for ``α <= 1``, so the verdict covers that
    part of the grid; values for ``α > 1`` are reported as data only.
    """
    if kappa < 0 or z0 < 0:
        raise ValueError(f"need kappa >= 0 and z0 >= 0, got kappa={kappa}, z0={z0}")
    alphas = _check_grid(alphas)
    zs = [kappa * a + z0 for a in alphas]
    if any(z <= 0 for z in zs):
        raise ValueError("z(alpha) = kappa*alpha + z0 must be positive on the grid")
    pair = _Pair(rho, sigma, support_tol)
    vals = [pair.d(a, z) for a, z in zip(alphas, zs)]
    rows = [(a, z, v.value, v.finite) for a, z, v in zip(alphas, zs, vals)]
    proved = [v.value for a, v in zip(alphas, vals) if a <= 1]
    ok, worst = _monotone(proved, tol) if proved else (None, 0.0)
    return ScanResult(rows, ok, {"verdict_region": "alpha<=1", "worst_drop": worst,
                                 "exploratory_points": sum(a > 1 for a in alphas)})
