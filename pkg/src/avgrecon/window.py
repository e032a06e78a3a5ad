"""Smooth cutoff windows built from normalized sine-power integrals.

The one-dimensional profile equals one on ``[-delta, delta]``, vanishes
outside ``(-2pi + delta, 2pi - delta)`` and in between is the normalized tail
integral of ``sin^p(pi (t - delta) / (2pi - 2 delta))``. Two variants exist:
``p = 2k`` with constant ``d_k`` (general measures) and ``p = k`` with
constant ``e_k`` (tensor-product measures).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .quadrature import DEFAULT_ORDER, gauss_legendre

GENERAL = "general"
SEPARATED = "separated"


def _check(k, delta):
    if int(k) != k or k < 1:
        raise DomainError(f"regularity order k must be a positive integer, got {k!r}")
    if not 0 < delta < math.pi:
        raise DomainError(f"delta must lie in (0, pi), got {delta!r}")


def sine_power_integral(p: int) -> float:
    """``int_0^pi sin^p t dt`` by the two-term Wallis recursion."""
    if p < 0:
        raise DomainError("power must be non-negative")
    c = math.pi if p % 2 == 0 else 2.0
    for j in range(2 if p % 2 == 0 else 3, p + 1, 2):
        c *= (j - 1) / j
    return c


def wallis_norm_even(k: int, delta: float) -> float:
    """``d_k``: reciprocal of the full ``sin^(2k)`` tail integral over ``[delta, 2pi - delta]``."""
    _check(k, delta)
    b = math.pi
    for j in range(1, k + 1):
        b *= (2 * j - 1) / (2 * j)
    return math.pi / ((2 * math.pi - 2 * delta) * b)


def wallis_norm_odd_or_even(k: int, delta: float) -> float:
    """``e_k``: the same normalization for the plain power ``sin^k``."""
    _check(k, delta)
    return math.pi / ((2 * math.pi - 2 * delta) * sine_power_integral(k))


@dataclass(frozen=True)
class WindowSpec:
    k: int
    delta: float
    power: int
    norm_const: float
    dim: int = 1

    @property
    def support(self) -> float:
        return 2 * math.pi - self.delta

    @property
    def variant(self) -> str:
        return GENERAL if self.power == 2 * self.k else SEPARATED

    @property
    def n_panels(self) -> int:
        return math.ceil(self.k / 4) + 2

    @property
    def plateau(self) -> float:
        # norm_const times the exact full integral; 1 up to rounding for a consistent spec
        full = (2 * math.pi - 2 * self.delta) / math.pi * sine_power_integral(self.power)
        return self.norm_const * full

    def with_norm_const(self, value: float) -> "WindowSpec":
        """Copy with a different normalization constant (used to probe consistency checks)."""
        return replace(self, norm_const=float(value))


def make_window(k: int, delta: float, variant: str = GENERAL, dim: int = 1) -> WindowSpec:
    _check(k, delta)
    if variant == GENERAL:
        return WindowSpec(int(k), float(delta), 2 * int(k), wallis_norm_even(k, delta), int(dim))
    if variant == SEPARATED:
        return WindowSpec(int(k), float(delta), int(k), wallis_norm_odd_or_even(k, delta), int(dim))
    raise DomainError(f"unknown window variant {variant!r}")


def tail_integral(spec: WindowSpec, a) -> np.ndarray:
    """``int_a^{2pi - delta} sin^p(pi (t - delta) / (2pi - 2 delta)) dt`` for ``a`` in the ramp.

    Composite Gauss-Legendre of order 16 over ``ceil(k/4) + 2`` equal panels.
    """
    a = np.asarray(a, dtype=float)
    top = spec.support
    scale = math.pi / (2 * math.pi - 2 * spec.delta)
    x, w = gauss_legendre(DEFAULT_ORDER)
    m = spec.n_panels
    h = (top - a) / m
    # local node offsets within [a, top]: panel i spans [a + i h, a + (i+1) h]
    centers = (np.arange(m) + 0.5)[:, None] + 0.5 * x[None, :]
    t = a[..., None, None] + h[..., None, None] * centers
    vals = np.sin(scale * (t - spec.delta)) ** spec.power
    return 0.5 * h * np.einsum("...ij,j->...", vals, w)


def eval_window_1d(spec: WindowSpec, s):
    """Evaluate the one-dimensional profile ``V_k`` at ``s`` (scalar or array)."""
    arr = np.abs(np.asarray(s, dtype=float))
    out = np.zeros(arr.shape)
    out[arr <= spec.delta] = spec.plateau
    ramp = (arr > spec.delta) & (arr <= spec.support)
    if np.any(ramp):
        out[ramp] = spec.norm_const * tail_integral(spec, arr[ramp])
    if out.ndim == 0:
        return float(out)
    return out


def eval_window(spec: WindowSpec, xi):
    """Tensor-product window ``V(xi) = prod_l V_k(xi_l)``; ``xi`` has shape ``(..., d)``."""
    xi = np.asarray(xi, dtype=float)
    scalar = xi.ndim <= 1
    xi = np.atleast_1d(xi)
    out = np.prod(eval_window_1d(spec, xi), axis=-1)
    return float(out) if scalar else out
