"""Multivariate Golden-Thompson inequality and its log-majorization form.

The averaging measure on the real line is

    dβ_θ(t) = sin(πθ) / (2θ (cosh(πt) + cos(πθ))) dt,      0 < θ < 1,

with the θ -> 0 limit ``π / (2 (cosh(πt) + 1))`` and a point mass at 0 for
θ = 1.  Integrals against β_θ are computed with composite Gauss-Legendre
quadrature on a truncated interval ``[-T, T]`` whose tail mass is bounded
analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .linalg import (
    DomainError,
    PreconditionError,
    as_hermitian,
    commutator_norm,
    direct_sum,
    hermitian_eig,
)
from .majorization import MajorizationReport, check_majorization

GL_ORDER = 16
PANEL_WIDTH = 0.5
DEFAULT_EPS = 1e-8


def beta_density(theta: float, t):
    """Density of β_θ at ``t`` (vectorized in ``t``) for ``0 <= θ < 1``."""
    if not 0.0 <= theta < 1.0:
        raise ValueError(f"theta must lie in [0, 1), got {theta}")
    t = np.asarray(t, dtype=float)
    with np.errstate(over="ignore"):
        c = np.cosh(np.pi * t)
    if theta == 0.0:
        out = np.pi / (2.0 * (c + 1.0))
    else:
        out = math.sin(math.pi * theta) / (2.0 * theta * (c + math.cos(math.pi * theta)))
    return out if out.ndim else float(out)


def tail_constant(theta: float) -> float:
    """``C`` with ``β_θ density <= C e^{-π|t|}`` for ``|t| >= 1``."""
    if theta == 0.0:
        return math.pi
    C = math.sin(math.pi * theta) / theta
    if math.cos(math.pi * theta) < 0:
        # cosh(πt) + cos(πθ) >= (e^{π|t|}/2)(1 - 2e^{-π}) once |t| >= 1
        C /= 1.0 - 2.0 * math.exp(-math.pi)
    return C


@dataclass(frozen=True)
class BetaQuadrature:
    theta: float
    eps: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    T: float
    tail_bound: float

    @property
    def mass(self) -> float:
        return math.fsum(self.weights)

    def integrate(self, values) -> float:
        """``Σ_k w_k f(t_k)`` in ascending node order (exactly rounded)."""
        return math.fsum(np.asarray(self.weights) * np.asarray(values, dtype=float))


def _breakpoints(T: float, h0: float) -> np.ndarray:
    """Nonnegative panel breakpoints: geometric from ``h0`` up to the panel width, then uniform."""
    pts = [0.0]
    h = h0
    while h < PANEL_WIDTH:
        pts.append(h)
        h *= 2.0
    x = PANEL_WIDTH
    while x < T:
        pts.append(x)
        x += PANEL_WIDTH
    pts.append(T)
    return np.unique(np.array(pts))


def build_quadrature(theta: float = 0.0, eps: float = DEFAULT_EPS, order: int = GL_ORDER) -> BetaQuadrature:
    """Quadrature rule for β_θ with truncation tail mass at most ``eps``.

    The density is bounded by ``C e^{-π|t|}``, so the mass outside
    ``[-T, T]`` is at most ``2C e^{-πT} / π``; ``T`` is chosen to make that
    equal to ``eps``.  Panels have width at most 0.5 and are refined
    geometrically towards the origin when θ is close to 1, where the
    density concentrates.  ``θ = 1`` gives the point mass at 0.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if theta == 1.0:
        return BetaQuadrature(1.0, eps, np.zeros(1), np.ones(1), 0.0, 0.0)
    C = tail_constant(theta)
    T = max(math.log(2.0 * C / (math.pi * eps)) / math.pi, 1.0)
    tail = 2.0 * C * math.exp(-math.pi * T) / math.pi
    h0 = min(PANEL_WIDTH, (1.0 - theta) / 2.0)
    right = _breakpoints(T, h0)
    edges = np.concatenate([-right[:0:-1], right])
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    weights = (0.5 * (b - a) * w).ravel() * beta_density(theta, nodes)
    return BetaQuadrature(float(theta), float(eps), nodes, weights, T, tail)


def _hermitian_list(H_list) -> list:
    Hs = [as_hermitian(H) for H in H_list]
    if not Hs:
        raise ValueError("need at least one matrix")
    if any(H.shape != Hs[0].shape for H in Hs):
        raise ValueError("all matrices must have the same dimension")
    return Hs


def _product_stack(eigs, zs: np.ndarray) -> np.ndarray:
    """Stack of ``∏_j e^{z_k H_j}`` (left to right) for each complex ``z_k``."""
    out = None
    for lam, U in eigs:
        E = (U[None, :, :] * np.exp(np.outer(zs, lam))[:, None, :]) @ U.conj().T
        out = E if out is None else out @ E
    return out


def node_singular_values(H_list, nodes) -> np.ndarray:
    """Singular values of ``∏_j e^{(1+it)H_j}`` at each node, one row per node."""
    eigs = [hermitian_eig(H) for H in _hermitian_list(H_list)]
    P = _product_stack(eigs, 1.0 + 1j * np.asarray(nodes, dtype=float))
    return np.linalg.svd(P, compute_uv=False)


@dataclass(frozen=True)
class GtReport:
    """``lhs = Tr exp(r ΣH_j)``, ``rhs`` the β_0 average of ``Tr|∏ e^{(1+it)H_j}|^r``."""

    lhs: float
    rhs: float
    gap: float
    r: float
    holds: bool
    tol: float
    quadrature_eps: float
    nodes: np.ndarray = field(repr=False)
    integrand: np.ndarray = field(repr=False)
    log_majorization: MajorizationReport | None = None

    @property
    def relative_gap(self) -> float:
        return self.gap / self.lhs

    def to_dict(self) -> dict:
        d = {
            "lhs": self.lhs, "rhs": self.rhs, "gap": self.gap,
            "relative_gap": self.relative_gap, "r": self.r, "holds": self.holds,
            "tol": self.tol, "quadrature_eps": self.quadrature_eps, "nodes": int(self.nodes.size),
        }
        if self.log_majorization is not None:
            d["log_majorization"] = self.log_majorization.to_dict()
        return d


def gt_check(H_list: Sequence, r: float = 1.0, quad: BetaQuadrature | None = None,
             tol: float | None = None) -> GtReport:
    """Evaluate both sides of the multivariate Golden-Thompson inequality.

    ``holds`` is ``gap >= -tol * lhs`` with ``tol`` defaulting to
    ``max(10 eps, 1e-12)``, since truncating the measure can only lower the
    right-hand side by a relative amount of order ``eps``.
    """
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    quad = build_quadrature(0.0) if quad is None else quad
    if quad.theta != 0.0:
        raise ValueError("the Golden-Thompson average uses the theta = 0 measure")
    Hs = _hermitian_list(H_list)
    lam = np.linalg.eigvalsh(sum(Hs))
    lhs = math.fsum(np.exp(r * lam))
    s = node_singular_values(Hs, quad.nodes)
    integrand = np.sum(s**r, axis=1)
    rhs = quad.integrate(integrand)
    tol = max(10.0 * quad.eps, 1e-12) if tol is None else tol
    gap = rhs - lhs
    return GtReport(lhs, rhs, gap, float(r), bool(gap >= -tol * lhs), tol, quad.eps,
                    quad.nodes, integrand)


def gt_log_majorization(A_list: Sequence, theta: float, quad: BetaQuadrature | None = None,
                        eps: float = 1e-10, tol: float | None = None) -> MajorizationReport:
    """Compare ``log λ(|∏A_j^θ|^{1/θ})`` with the β_θ average of ``log λ(|∏A_j^{1+it}|)``.

    Inputs must be positive definite.  The quadrature weights are rescaled
    to unit mass, which keeps the totals equal (both are ``log det ∏A_j``);
    the partial sums then carry an error of order ``eps``.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    eigs = []
    for A in A_list:
        lam, U = hermitian_eig(as_hermitian(A))
        if lam[-1] <= 0:
            raise DomainError("inputs must be positive definite")
        eigs.append((np.log(lam), U))
    if not eigs:
        raise ValueError("need at least one matrix")
    quad = build_quadrature(theta, eps) if quad is None else quad
    if quad.theta != theta:
        raise ValueError(f"quadrature built for theta={quad.theta}, not {theta}")
    tol = max(10.0 * quad.eps, 1e-9) if tol is None else tol
    lhs = np.log(np.linalg.svd(_product_stack(eigs, np.array([theta]))[0], compute_uv=False)) / theta
    logs = np.log(np.linalg.svd(_product_stack(eigs, 1.0 + 1j * quad.nodes), compute_uv=False))
    w = quad.weights / quad.mass
    rhs = np.array([math.fsum(w * logs[:, i]) for i in range(logs.shape[1])])
    return check_majorization(lhs, rhs, tol)


class BlockTriple(NamedTuple):
    H1: np.ndarray
    H2: np.ndarray
    H3: np.ndarray
    commutators: dict

    @property
    def all_noncommuting(self) -> bool:
        return all(v > 0 for v in self.commutators.values())


def block_equality_triple(H, K, tol: float = 1e-12) -> BlockTriple:
    """``H1 = H ⊕ H``, ``H2 = (-H) ⊕ (-K)``, ``H3 = K ⊕ K``.

    For non-commuting ``H, K`` no pair, no matrix against the sum of two
    others, and no matrix against the total sum commutes, yet the
    Golden-Thompson inequality is an equality for every ``r > 0``.  The
    Frobenius norms of those commutators are returned for inspection.

    Raises
    ------
    PreconditionError
        If ``H`` and ``K`` commute.
    """
    H, K = as_hermitian(H), as_hermitian(K)
    if commutator_norm(H, K) <= tol * (1.0 + np.linalg.norm(H) * np.linalg.norm(K)):
        raise PreconditionError("H and K commute")
    Hs = [direct_sum(H, H), direct_sum(-H, -K), direct_sum(K, K)]
    c = {}
    for j in range(3):
        for k in range(j + 1, 3):
            c[f"[H{j + 1},H{k + 1}]"] = commutator_norm(Hs[j], Hs[k])
    for j in range(3):
        for k in range(3):
            for l in range(k + 1, 3):
                if j not in (k, l):
                    c[f"[H{j + 1},H{k + 1}+H{l + 1}]"] = commutator_norm(Hs[j], Hs[k] + Hs[l])
    total = sum(Hs)
    for j in range(3):
        c[f"[H{j + 1},H1+H2+H3]"] = commutator_norm(Hs[j], total)
    return BlockTriple(*Hs, c)


def lieb_triple_integral(H1, H2, H3, quad: BetaQuadrature | None = None) -> float:
    """``∫ Tr e^{H1} e^{(1+it)H2/2} e^{H3} e^{(1-it)H2/2} dβ_0(t)``."""
    quad = build_quadrature(0.0) if quad is None else quad
    if quad.theta != 0.0:
        raise ValueError("the triple integral uses the theta = 0 measure")
    (l1, U1), (l2, U2), (l3, U3) = (hermitian_eig(as_hermitian(H)) for H in (H1, H2, H3))
    E1 = (U1 * np.exp(l1)) @ U1.conj().T
    E3 = (U3 * np.exp(l3)) @ U3.conj().T
    ts = quad.nodes
    L = _product_stack([(l2, U2)], (1.0 + 1j * ts) / 2.0)
    R = _product_stack([(l2, U2)], (1.0 - 1j * ts) / 2.0)
    vals = np.trace(E1[None] @ L @ E3[None] @ R, axis1=1, axis2=2).real
    return quad.integrate(vals)
