"""Exact ground truth for bandlimited test functions.

Test functions are finite combinations of the reproducing kernel
``K(u) = prod_l sin(delta u_l) / (pi u_l)`` of the Paley-Wiener space, so point
values, L2 norms and averages under atomic measures are all available in closed
form.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .measure import SamplingMeasure

EXACT_ORACLE = "exact_oracle"
EXTERNAL = "external"


def pw_kernel(u: np.ndarray, delta: float) -> np.ndarray:
    """``prod_l sin(delta u_l) / (pi u_l)`` over the last axis, with ``delta / pi`` at 0."""
    u = np.asarray(u, dtype=float)
    return np.prod(delta / math.pi * np.sinc(delta * u / math.pi), axis=-1)


@dataclass(frozen=True, eq=False)
class BandlimitedTestFunction:
    delta: float
    dim: int
    centers: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float).reshape(-1, self.dim)
        coeffs = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if centers.shape[0] != coeffs.shape[0]:
            raise DomainError("centers and coeffs must have equal length")
        if not 0 < self.delta < math.pi:
            raise DomainError(f"delta must lie in (0, pi), got {self.delta!r}")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, x) -> np.ndarray:
        return eval_f(self, x)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "dim": self.dim,
            "centers": self.centers.tolist(),
            "coeffs": self.coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BandlimitedTestFunction":
        return cls(float(data["delta"]), int(data["dim"]), data["centers"], data["coeffs"])

    def scaled(self, alpha: float) -> "BandlimitedTestFunction":
        return BandlimitedTestFunction(self.delta, self.dim, self.centers, alpha * self.coeffs)


def default_test_function(dim: int = 1, delta: float = math.pi / 2) -> BandlimitedTestFunction:
    if dim == 1:
        return BandlimitedTestFunction(delta, 1, [[0.3], [2.7], [-1.4]], [1.0, -0.5, 0.25])
    if dim == 2:
        return BandlimitedTestFunction(delta, 2, [[0.3, 0.4], [-1.2, 2.1]], [1.0, -0.7])
    raise DomainError("default test functions exist for d = 1 and d = 2 only")


def zero_function(dim: int, delta: float = math.pi / 2) -> BandlimitedTestFunction:
    return BandlimitedTestFunction(delta, dim, np.zeros((1, dim)), [0.0])


def eval_f(f: BandlimitedTestFunction, x):
    """Exact value(s) at a point of length d or an array of shape ``(..., d)``."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim <= 1
    x = np.atleast_1d(x)
    if x.shape[-1] != f.dim:
        raise DomainError(f"expected points of dimension {f.dim}")
    diff = x[..., None, :] - f.centers
    out = pw_kernel(diff, f.delta) @ f.coeffs
    return float(out) if scalar else out


def l2_norm(f: BandlimitedTestFunction) -> float:
    """``sqrt(c^T K c)`` with the Gram matrix projected onto the PSD cone."""
    gram = pw_kernel(f.centers[:, None, :] - f.centers[None, :, :], f.delta)
    evals, evecs = np.linalg.eigh(0.5 * (gram + gram.T))
    proj = evecs.T @ f.coeffs
    return math.sqrt(math.fsum(np.clip(evals, 0, None) * proj**2))


def lattice(n: int, dim: int) -> np.ndarray:
    """All ``j`` in ``[-n, n]^dim`` in lexicographic order, shape ``(m, dim)``."""
    return np.array(list(itertools.product(range(-n, n + 1), repeat=dim)), dtype=float).reshape(-1, dim)


@dataclass(frozen=True, eq=False)
class SamplePatch:
    """Average samples ``mu_j`` for every ``j`` in ``[-n, n]^d``.

    ``values`` has shape ``(2n+1,) * d`` and is indexed by ``j + n``.
    """

    n: int
    d: int
    values: np.ndarray
    provenance: str = EXTERNAL
    delta: float | None = None
    sigma: float | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (2 * self.n + 1,) * self.d:
            raise DomainError(f"patch values must have shape {(2 * self.n + 1,) * self.d}, got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __getitem__(self, j) -> float:
        return float(self.values[tuple(np.asarray(j, dtype=int) + self.n)])

    def flat(self) -> np.ndarray:
        """Values in lexicographic order of ``j``."""
        return self.values.reshape(-1)

    def scaled(self, c: float) -> "SamplePatch":
        return SamplePatch(self.n, self.d, c * self.values, self.provenance, self.delta, self.sigma)


def exact_average_samples(f: BandlimitedTestFunction, measure: SamplingMeasure, n: int) -> SamplePatch:
    """``mu_j = sum_a w_a f(t_a + j)`` for all ``j`` in ``[-n, n]^d``."""
    if measure.dim != f.dim:
        raise DomainError("measure and test function dimensions differ")
    js = lattice(n, f.dim)
    pts = js[:, None, :] + measure.atoms[None, :, :]
    mu = eval_f(f, pts) @ measure.weights
    return SamplePatch(
        n, f.dim, mu.reshape((2 * n + 1,) * f.dim), EXACT_ORACLE, f.delta, measure.width
    )


def point_samples(f: BandlimitedTestFunction, n: int, spacing: float) -> np.ndarray:
    """``f(j * spacing)`` on ``[-n, n]^d``, shaped like a patch."""
    js = lattice(n, f.dim)
    return eval_f(f, js * spacing).reshape((2 * n + 1,) * f.dim)


def nyquist_samples(f: BandlimitedTestFunction, n: int) -> np.ndarray:
    return point_samples(f, n, math.pi / f.delta)


def truncated_shannon(samples: np.ndarray, x, n: int, delta: float) -> np.ndarray | float:
    """Truncated Shannon series from Nyquist-lattice samples ``f(j pi / delta)``.

    Uses the cardinal factor ``sin(delta x_l - pi j_l) / (delta x_l - pi j_l)``,
    which equals one at ``x_l = pi j_l / delta``.
    """
    samples = np.asarray(samples, dtype=float)
    dim = samples.ndim
    x = np.asarray(x, dtype=float)
    scalar = x.ndim <= 1
    x = np.atleast_1d(x).reshape(-1, dim)
    js = lattice(n, dim)
    factors = np.sinc((delta * x[:, None, :] - math.pi * js[None, :, :]) / math.pi)
    weights = np.prod(factors, axis=-1)
    terms = weights * samples.reshape(-1)[None, :]
    out = np.array([math.fsum(row) for row in terms])
    return float(out[0]) if scalar else out
