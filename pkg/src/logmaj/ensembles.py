"""Seeded random matrix ensembles.

Every randomized case draws from its own generator, seeded by
``(seed, suite id, case index)`` through :class:`numpy.random.SeedSequence`,
so a case's inputs do not depend on which other cases ran or in what order.
"""

from __future__ import annotations

import re
import zlib

import numpy as np

from .linalg import hermitize

PD_SHIFT = 1e-3


def case_rng(seed: int, suite: str, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(suite.encode()), index]))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    """QR of a complex Gaussian matrix with the phases of ``R`` divided out."""
    Q, R = np.linalg.qr(complex_gaussian(rng, (m, m)))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_pd(rng: np.random.Generator, m: int, mu: float = PD_SHIFT) -> np.ndarray:
    """``G* G + μ I`` with ``G`` complex Gaussian."""
    G = complex_gaussian(rng, (m, m))
    return hermitize(G.conj().T @ G + mu * np.eye(m))


def random_psd_rank(rng: np.random.Generator, m: int, r: int, mu: float = PD_SHIFT) -> np.ndarray:
    """A random PD matrix compressed to a random rank-``r`` projection."""
    if not 0 <= r <= m:
        raise ValueError(f"rank must lie in 0..{m}, got {r}")
    Q = haar_unitary(rng, m)[:, :r]
    P = Q @ Q.conj().T
    return hermitize(P @ random_pd(rng, m, mu) @ P)


def random_hermitian(rng: np.random.Generator, m: int, radius: float = 1.0) -> np.ndarray:
    """Hermitian matrix with eigenvalues uniform in ``[-radius, radius]``."""
    U = haar_unitary(rng, m)
    return hermitize((U * rng.uniform(-radius, radius, m)) @ U.conj().T)


def random_well_conditioned(rng: np.random.Generator, m: int, radius: float = 1.0) -> np.ndarray:
    """``exp(H)`` for random Hermitian ``H`` with spectrum in ``[-radius, radius]``."""
    U = haar_unitary(rng, m)
    return hermitize((U * np.exp(rng.uniform(-radius, radius, m))) @ U.conj().T)


def commuting_family(rng: np.random.Generator, m: int, n: int, low: float = 0.1, high: float = 3.0,
                     zero_fraction: float = 0.0) -> list:
    """``n`` matrices sharing a Haar eigenbasis with independent positive spectra.

    With ``zero_fraction > 0`` each eigenvalue is independently replaced by
    zero with that probability, producing singular members.
    """
    U = haar_unitary(rng, m)
    out = []
    for _ in range(n):
        d = rng.uniform(low, high, m)
        if zero_fraction > 0:
            d = np.where(rng.random(m) < zero_fraction, 0.0, d)
        out.append(hermitize((U * d) @ U.conj().T))
    return out


def random_weights(rng: np.random.Generator, n: int) -> np.ndarray:
    w = rng.uniform(0.2, 1.0, n)
    w /= w.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return w


_KIND = re.compile(r"^(pd|psd-rank-(\d+)|commuting-family-(\d+))$")


def random_psd(m: int, seed: int = 0, kind: str = "pd"):
    """Draw from a named ensemble.

    ``kind`` is ``"pd"``, ``"psd-rank-R"`` or ``"commuting-family-N"``; the
    last returns a list of ``N`` matrices.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    match = _KIND.match(kind)
    if not match:
        raise ValueError(f"unknown ensemble kind {kind!r}")
    rng = np.random.default_rng(seed)
    if kind == "pd":
        return random_pd(rng, m)
    if match.group(2):
        return random_psd_rank(rng, m, int(match.group(2)))
    return commuting_family(rng, m, int(match.group(3)))
