"""Reconstruction kernel: ``Phi_hat = V / U`` and its inverse Fourier transform.

With the unitary convention ``f_hat(xi) = (2pi)^(-d/2) int f(x) exp(-i<x,xi>) dx``
the kernel is ``Phi(x) = (2pi)^(-d/2) int Phi_hat(xi) exp(i<x,xi>) dxi`` over the
support cube ``[-2pi + delta, 2pi - delta]^d``.

Each one-dimensional inverse transform uses a composite Gauss-Legendre rule
whose panels break at ``+-delta`` and shrink with the oscillation frequency
``|x_l|``. Frequencies are rounded up to a multiple of ``FREQUENCY_BUCKET`` so
that one rule (and one table of ``Phi_hat`` node values) serves many offsets,
and so that the value computed for a given offset never depends on which
other offsets were requested alongside it.
"""
from __future__ import annotations

import functools
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import (
    DomainError,
    ImaginaryResidue,
    ModeUnavailable,
    NearZeroDenominator,
    WidthConditionViolated,
)
from .measure import SamplingMeasure, exp_transform, exp_transform_1d, measure_constants
from .quadrature import DEFAULT_ORDER, QuadratureRule, integrate_nd, oscillatory_panels
from .window import GENERAL, SEPARATED, WindowSpec, eval_window_1d

FREQUENCY_BUCKET = 8.0
IMAG_TOL = 1e-9
COMPLETE_TOL = 1e-12
_ROW_CHUNK = 256
_GRID_CACHE_SIZE = 2


def frequency_bucket(x: float) -> float:
    return FREQUENCY_BUCKET * math.ceil(abs(x) / FREQUENCY_BUCKET)


def _real_part(values: np.ndarray) -> np.ndarray:
    resid = np.max(np.abs(values.imag), initial=0.0)
    if resid > IMAG_TOL:
        raise ImaginaryResidue(f"imaginary residue {resid:.3e} exceeds {IMAG_TOL:g}")
    return np.ascontiguousarray(values.real)


class ReconstructionKernel:
    """Evaluable kernel ``Phi`` for one measure, window and mode.

    Parameters
    ----------
    measure : SamplingMeasure
    window : WindowSpec
        Supplies ``delta``, the power and the normalization constant.
    mode : {"general", "separated"}
        ``separated`` uses the per-axis factors of ``measure`` and builds
        ``Phi`` as a product of one-dimensional kernels.
    quad_order : int
        Gauss-Legendre nodes per panel.
    profile : callable, optional
        Replaces the one-dimensional window profile. Test hook only.
    extra_splits : sequence of float
        Additional panel breakpoints, needed when ``profile`` has kinks.
    """

    def __init__(
        self,
        measure: SamplingMeasure,
        window: WindowSpec,
        mode: str = GENERAL,
        quad_order: int = DEFAULT_ORDER,
        profile: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        extra_splits: Sequence[float] = (),
    ):
        if mode not in (GENERAL, SEPARATED):
            raise DomainError(f"unknown mode {mode!r}")
        self.measure = measure
        self.window = window
        self.delta = window.delta
        self.mode = mode
        self.quad_order = int(quad_order)
        self.dim = measure.dim
        self.profile = profile
        self.extra_splits = tuple(float(s) for s in extra_splits)
        self.constants = measure_constants(measure, self.delta)

        if mode == SEPARATED:
            factors = measure.factors()
            if factors is None:
                raise ModeUnavailable("separated mode needs a tensor-product measure")
            if not self.constants.width_condition_separated:
                raise WidthConditionViolated(
                    f"(2pi - delta) * sigma = {(2 * math.pi - self.delta) * measure.width:.6g} is not < pi"
                )
            self.factors = factors
            self.threshold = self.constants.gamma_tilde
        else:
            if not self.constants.width_condition_general:
                raise WidthConditionViolated(
                    f"(2pi - delta) * sigma * d = "
                    f"{(2 * math.pi - self.delta) * measure.width * measure.dim:.6g} is not < pi"
                )
            self.factors = (measure,) if self.dim == 1 else None
            self.threshold = self.constants.gamma

        self.support = 2 * math.pi - self.delta
        self.default_width = (2 * math.pi - 2 * self.delta) / window.n_panels
        self.cache: dict[tuple[float, ...], float] = {}
        self.axis_cache: list[dict[float, float]] = [{} for _ in range(self.dim)]
        self._lock = threading.Lock()
        self._rules: dict[float, QuadratureRule] = {}
        self._node_tables: dict[tuple[int, float], tuple[np.ndarray, np.ndarray]] = {}
        self._grid_tables: OrderedDict = OrderedDict()

    # -- frequency domain -------------------------------------------------

    def window_1d(self, s) -> np.ndarray:
        if self.profile is not None:
            return np.asarray(self.profile(np.asarray(s, dtype=float)), dtype=float)
        return np.asarray(eval_window_1d(self.window, s), dtype=float)

    def transform(self, xi) -> np.ndarray:
        """``U`` at points of shape ``(..., d)`` (product of factors in separated mode)."""
        xi = np.asarray(xi, dtype=float)
        if self.mode == SEPARATED:
            out = np.ones(xi.shape[:-1], dtype=complex)
            for l, f in enumerate(self.factors):
                out = out * exp_transform_1d(f, xi[..., l])
            return out
        return np.asarray(exp_transform(self.measure, xi))

    def _divide(self, v: np.ndarray, u_of: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        out = np.zeros(v.shape, dtype=complex)
        live = v != 0
        if np.any(live):
            u = u_of(live)
            if np.min(np.abs(u)) < self.threshold / 2:
                raise NearZeroDenominator(
                    f"|U| = {np.min(np.abs(u)):.3e} below half the guaranteed lower bound {self.threshold:.6g}"
                )
            out[live] = v[live] / u
        return out

    def phi_hat_1d(self, axis: int, s) -> np.ndarray:
        """One-dimensional factor ``V_k(s) / U_l(s)`` (separated mode, or any mode with d = 1)."""
        s = np.asarray(s, dtype=float)
        factor = self.factors[axis]
        return self._divide(self.window_1d(s), lambda live: exp_transform_1d(factor, s[live]))

    def phi_hat(self, xi):
        """``Phi_hat`` at a point of length d or an array of shape ``(..., d)``."""
        xi = np.asarray(xi, dtype=float)
        scalar = xi.ndim <= 1
        xi = np.atleast_1d(xi)
        if xi.shape[-1] != self.dim:
            raise DomainError(f"expected points of dimension {self.dim}")
        if self.mode == SEPARATED:
            out = np.ones(xi.shape[:-1], dtype=complex)
            for l in range(self.dim):
                out = out * self.phi_hat_1d(l, xi[..., l])
        else:
            v = np.prod(self.window_1d(xi), axis=-1)
            out = self._divide(v, lambda live: np.asarray(exp_transform(self.measure, xi[live])))
        return complex(out) if scalar else out

    # -- quadrature plumbing ----------------------------------------------

    def rule(self, bucket: float) -> QuadratureRule:
        r = self._rules.get(bucket)
        if r is None:
            r = self._rules[bucket] = self._make_rule(bucket)
        return r

    def _make_rule(self, bucket: float) -> QuadratureRule:
        splits = (-self.delta, self.delta) + tuple(s for s in self.extra_splits if abs(s) < self.support)
        return oscillatory_panels(
            (-self.support, self.support), splits, bucket, self.quad_order, self.default_width
        )

    def _node_table(self, axis: int, bucket: float) -> tuple[np.ndarray, np.ndarray]:
        key = (axis, bucket)
        table = self._node_tables.get(key)
        if table is None:
            r = self.rule(bucket)
            table = (r.nodes, r.weights * self.phi_hat_1d(axis, r.nodes))
            self._node_tables[key] = table
        return table

    def _grid_table(self, buckets: tuple[float, ...]) -> tuple[list[np.ndarray], np.ndarray]:
        table = self._grid_tables.get(buckets)
        if table is not None:
            self._grid_tables.move_to_end(buckets)
            return table
        rules = [self.rule(b) for b in buckets]
        nodes = [r.nodes for r in rules]
        v = functools.reduce(np.multiply.outer, [self.window_1d(x) for x in nodes])
        w = functools.reduce(np.multiply.outer, [r.weights for r in rules])
        u = np.zeros(v.shape, dtype=complex)
        for t, wt in zip(self.measure.atoms, self.measure.weights):
            u += wt * functools.reduce(np.multiply.outer, [np.exp(1j * tl * x) for tl, x in zip(t, nodes)])
        if np.min(np.abs(u)) < self.threshold / 2:
            raise NearZeroDenominator(f"|U| = {np.min(np.abs(u)):.3e} below half of {self.threshold:.6g}")
        table = (nodes, w * v / u)
        self._grid_tables[buckets] = table
        while len(self._grid_tables) > _GRID_CACHE_SIZE:
            self._grid_tables.popitem(last=False)
        return table

    def _axis_values(self, axis: int, xs: np.ndarray) -> np.ndarray:
        """Uncached one-dimensional inverse transforms ``phi_l(x)``."""
        xs = np.asarray(xs, dtype=float)
        out = np.empty(xs.shape)
        buckets = np.array([frequency_bucket(x) for x in xs])
        for b in np.unique(buckets):
            idx = np.nonzero(buckets == b)[0]
            nodes, wv = self._node_table(axis, float(b))
            vals = np.empty(len(idx), dtype=complex)
            for start in range(0, len(idx), _ROW_CHUNK):
                sub = idx[start:start + _ROW_CHUNK]
                e = np.exp(1j * np.multiply.outer(xs[sub], nodes))
                vals[start:start + len(sub)] = (e * wv).sum(axis=1)
            out[idx] = _real_part(vals) / math.sqrt(2 * math.pi)
        return out

    def axis_values(self, axis: int, xs) -> np.ndarray:
        """Cached one-dimensional factor values along ``axis``."""
        xs = np.asarray(xs, dtype=float).reshape(-1)
        cache = self.axis_cache[axis]
        missing = sorted({float(x) for x in xs if float(x) not in cache})
        if missing:
            vals = self._axis_values(axis, np.array(missing))
            with self._lock:
                cache.update(zip(missing, vals.tolist()))
        return np.array([cache[float(x)] for x in xs])

    def _general_grid(self, axes: Sequence[np.ndarray]) -> np.ndarray:
        axes = [np.asarray(a, dtype=float).reshape(-1) for a in axes]
        out = np.empty(tuple(len(a) for a in axes))
        per_axis = [np.array([frequency_bucket(x) for x in a]) for a in axes]
        groups = [[(float(b), np.nonzero(bk == b)[0]) for b in np.unique(bk)] for bk in per_axis]
        for combo in _product(groups):
            buckets = tuple(b for b, _ in combo)
            nodes, g = self._grid_table(buckets)
            r = g
            for l, (_, idx) in enumerate(combo):
                e = np.exp(1j * np.multiply.outer(axes[l][idx], nodes[l]))
                r = np.tensordot(r, e, axes=([0], [1]))
            out[np.ix_(*(idx for _, idx in combo))] = _real_part(r)
        return out / (2 * math.pi) ** (self.dim / 2)

    # -- public evaluation --------------------------------------------------

    def values(self, offsets) -> np.ndarray:
        """``Phi`` at offsets of shape ``(m, d)``, consulting and filling the cache."""
        offsets = np.asarray(offsets, dtype=float).reshape(-1, self.dim)
        keys = [tuple(map(float, row)) for row in offsets]
        missing = sorted({k for k in keys if k not in self.cache})
        if missing:
            arr = np.array(missing)
            if self.factors is not None:
                vals = np.ones(len(missing))
                for l in range(self.dim):
                    vals = vals * self.axis_values(l, arr[:, l])
            else:
                vals = np.array([self._general_grid([[v] for v in key]).item() for key in missing])
            with self._lock:
                self.cache.update(zip(missing, vals.tolist()))
        return np.array([self.cache[k] for k in keys])

    def grid(self, axes: Sequence[Sequence[float]]) -> np.ndarray:
        """``Phi`` on the Cartesian product of per-axis offsets (not cached)."""
        if len(axes) != self.dim:
            raise DomainError(f"expected {self.dim} offset axes, got {len(axes)}")
        if self.factors is not None:
            parts = [self.axis_values(l, a) for l, a in enumerate(axes)]
            return functools.reduce(np.multiply.outer, parts)
        return self._general_grid(axes)

    def phi_l2_norm_sq(self) -> float:
        """``||Phi||^2 = int |Phi_hat|^2`` by tensor quadrature."""
        r = self.rule(0.0)
        if self.factors is not None:
            return math.prod(
                float(np.sum(r.weights * np.abs(self.phi_hat_1d(l, r.nodes)) ** 2)) for l in range(self.dim)
            )

        def integrand(*xs):
            pts = np.stack(np.broadcast_arrays(*xs), axis=-1)
            return np.abs(self.phi_hat(pts)) ** 2

        return integrate_nd(integrand, [r] * self.dim)


def _product(groups):
    if not groups:
        yield ()
        return
    for head in groups[0]:
        for tail in _product(groups[1:]):
            yield (head,) + tail


def make_kernel(measure, window, mode=GENERAL, quad_order=DEFAULT_ORDER, **hooks) -> ReconstructionKernel:
    return ReconstructionKernel(measure, window, mode, quad_order, **hooks)


def phi_hat(kern: ReconstructionKernel, xi):
    return kern.phi_hat(xi)


def phi_value(kern: ReconstructionKernel, x) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return float(kern.values(x.reshape(1, -1))[0])


def build_kernel_table(kern: ReconstructionKernel, offsets) -> dict:
    offsets = np.asarray(offsets, dtype=float)
    if offsets.size:
        kern.values(offsets.reshape(-1, kern.dim))
    return kern.cache


@dataclass(frozen=True)
class CompletenessReport:
    max_deviation: float
    probe_count: int
    tolerance: float = COMPLETE_TOL

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def verify_complete_reconstruction(kern: ReconstructionKernel, probe_count: int = 200) -> CompletenessReport:
    """Max of ``|Phi_hat * U - 1|`` over Halton probes in ``[-delta, delta]^d``."""
    probes = qmc.Halton(d=kern.dim, scramble=False).random(probe_count + 1)[1:]
    xi = (2 * probes - 1) * kern.delta
    dev = np.abs(kern.phi_hat(xi) * kern.transform(xi) - 1)
    return CompletenessReport(float(np.max(dev)), probe_count)
