"""Unitarily invariant norms selected by name.

A norm is a symmetric gauge function of the singular values, so every
norm here can be evaluated either on a matrix or directly on a vector of
singular values.  Names accepted by :func:`parse_norm`::

    trace, frobenius, operator, schatten:P, kyfan:K
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import schatten_from_sv, singular_values


@dataclass(frozen=True)
class Norm:
    kind: str  # "schatten" or "kyfan"
    index: float

    @property
    def strictly_increasing(self) -> bool:
        """Schatten p-norms with p < inf are strictly increasing; Ky Fan k-norms
        are only when k covers every singular value, which depends on the size,
        so they are reported as not strictly increasing."""
        return self.kind == "schatten" and self.index < math.inf

    def from_singular_values(self, s) -> float:
        s = np.sort(np.asarray(s, dtype=float))[::-1]
        if self.kind == "schatten":
            return schatten_from_sv(s, self.index)
        k = int(self.index)
        if not 1 <= k <= s.size:
            raise ValueError(f"Ky Fan index must lie in 1..{s.size}, got {k}")
        return float(np.sum(s[:k]))

    def __call__(self, X) -> float:
        return self.from_singular_values(singular_values(X))

    def __str__(self) -> str:
        if self.kind == "kyfan":
            return f"kyfan:{int(self.index)}"
        if self.index == 1:
            return "trace"
        if self.index == 2:
            return "frobenius"
        if self.index == math.inf:
            return "operator"
        return f"schatten:{self.index:g}"


TRACE = Norm("schatten", 1.0)
FROBENIUS = Norm("schatten", 2.0)
OPERATOR = Norm("schatten", math.inf)


def schatten(p: float) -> Norm:
    if p < 1:
        raise ValueError(f"Schatten index must be >= 1, got {p}")
    return Norm("schatten", float(p))


def ky_fan(k: int) -> Norm:
    if k < 1:
        raise ValueError(f"Ky Fan index must be >= 1, got {k}")
    return Norm("kyfan", float(k))


def parse_norm(spec: str | Norm) -> Norm:
    """Parse ``trace``, ``frobenius``, ``operator``, ``schatten:p`` or ``kyfan:k``."""
    if isinstance(spec, Norm):
        return spec
    name, _, arg = spec.strip().lower().partition(":")
    if name == "trace" and not arg:
        return TRACE
    if name == "frobenius" and not arg:
        return FROBENIUS
    if name == "operator" and not arg:
        return OPERATOR
    if name == "schatten" and arg:
        p = math.inf if arg in ("inf", "infinity") else float(arg)
        return schatten(p)
    if name in ("kyfan", "ky-fan") and arg:
        return ky_fan(int(arg))
    raise ValueError(f"unrecognized norm {spec!r}")
