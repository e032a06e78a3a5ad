"""Composite Gauss-Legendre quadrature in one and several dimensions."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NonFiniteIntegrand

MAX_ORDER = 64
DEFAULT_ORDER = 16


@functools.lru_cache(maxsize=None)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    # enforce exact symmetry about the origin
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``order``-point Gauss-Legendre rule on [-1, 1]."""
    if int(order) != order or not 1 <= order <= MAX_ORDER:
        raise DomainError(f"order must be an integer in [1, {MAX_ORDER}], got {order!r}")
    return _leggauss(int(order))


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Legendre rule of a fixed order replicated over contiguous panels."""

    order: int
    panels: tuple[tuple[float, float], ...]
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.panels:
            raise DomainError("a rule needs at least one panel")
        for (a, b), (c, _) in zip(self.panels, self.panels[1:]):
            if b != c:
                raise DomainError("panels must be sorted and tile the interval without gaps")
        if any(not (a < b) for a, b in self.panels):
            raise DomainError("panels must have positive length")
        x, w = gauss_legendre(self.order)
        p = np.asarray(self.panels, dtype=float)
        mid = 0.5 * (p[:, 0] + p[:, 1])
        half = 0.5 * (p[:, 1] - p[:, 0])
        nodes = (mid[:, None] + half[:, None] * x[None, :]).reshape(-1)
        weights = (half[:, None] * w[None, :]).reshape(-1)
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def interval(self) -> tuple[float, float]:
        return self.panels[0][0], self.panels[-1][1]

    def refined(self, factor: int = 2) -> "QuadratureRule":
        """Same rule with every panel split into ``factor`` equal parts."""
        panels = []
        for a, b in self.panels:
            edges = np.linspace(a, b, factor + 1)
            edges[0], edges[-1] = a, b
            panels.extend(zip(edges[:-1].tolist(), edges[1:].tolist()))
        return QuadratureRule(self.order, tuple(panels))


def uniform_rule(a: float, b: float, n_panels: int, order: int = DEFAULT_ORDER) -> QuadratureRule:
    return QuadratureRule(order, _split(a, b, n_panels))


def _split(a: float, b: float, n: int) -> tuple[tuple[float, float], ...]:
    edges = np.linspace(a, b, n + 1)
    edges[0], edges[-1] = a, b
    return tuple(zip(edges[:-1].tolist(), edges[1:].tolist()))


def oscillatory_panels(
    domain: tuple[float, float],
    split_points: Sequence[float] = (),
    max_frequency: float = 0.0,
    order: int = DEFAULT_ORDER,
    default_width: float = math.inf,
) -> QuadratureRule:
    """Panel layout for integrands oscillating like ``exp(i * max_frequency * t)``.

    Panels break at every split point and are no wider than
    ``min(default_width, 2*pi / (max_frequency * order / 4))``.
    """
    a, b = map(float, domain)
    if not a < b:
        raise DomainError(f"empty domain {domain!r}")
    if not max_frequency >= 0:
        raise DomainError(f"max_frequency must be non-negative, got {max_frequency!r}")
    if not default_width > 0:
        raise DomainError("default_width must be positive")
    gauss_legendre(order)
    splits = sorted(set(float(s) for s in split_points))
    for s in splits:
        if not a <= s <= b:
            raise DomainError(f"split point {s} lies outside [{a}, {b}]")
    width = default_width
    if max_frequency > 0:
        width = min(width, 2 * math.pi / (max_frequency * order / 4))
    edges = [a] + [s for s in splits if a < s < b] + [b]
    panels: list[tuple[float, float]] = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        n = max(1, math.ceil((hi - lo) / width - 1e-12))
        panels.extend(_split(lo, hi, n))
    return QuadratureRule(order, tuple(panels))


def _check_finite(values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise NonFiniteIntegrand("integrand is not finite at some quadrature node")


def integrate_1d(f: Callable[[np.ndarray], np.ndarray], rule: QuadratureRule):
    """Apply ``rule`` to a vectorized integrand; panel sums are added in sorted order."""
    values = np.asarray(f(rule.nodes))
    _check_finite(values)
    per_panel = (values * rule.weights).reshape(len(rule.panels), rule.order).sum(axis=1)
    if np.iscomplexobj(per_panel):
        return complex(math.fsum(per_panel.real), math.fsum(per_panel.imag))
    return math.fsum(per_panel)


def integrate_nd(f: Callable[..., np.ndarray], rules: Sequence[QuadratureRule]):
    """Tensor-product quadrature; ``f`` receives one broadcastable array per axis."""
    grids = np.meshgrid(*(r.nodes for r in rules), indexing="ij", sparse=True)
    values = np.asarray(f(*grids))
    _check_finite(values)
    for r in rules:
        values = np.tensordot(values, r.weights, axes=([0], [0]))
    return complex(values) if np.iscomplexobj(values) else float(values)
