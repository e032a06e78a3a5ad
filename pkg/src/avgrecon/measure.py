"""Discrete sampling probability measures and their exponential transform.

A measure lives on the closed cube ``[-width/2, width/2]^dim`` and is stored
as a finite list of atoms with positive weights summing to one. Measures built
by :func:`tensor_measure` remember their one-dimensional factors, which the
separated reconstruction path relies on.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import AtomOutOfCube, DomainError, MixedWidths, WeightsNotProbability

WEIGHT_SUM_TOL = 1e-9
TENSOR_MATCH_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SamplingMeasure:
    dim: int
    width: float
    atoms: np.ndarray
    weights: np.ndarray
    separated: Optional[tuple["SamplingMeasure", ...]] = None

    @property
    def n_atoms(self) -> int:
        return len(self.weights)

    def factors(self) -> Optional[tuple["SamplingMeasure", ...]]:
        """One-dimensional factors, or None when the measure is not a tensor product.

        A one-dimensional measure is trivially its own single factor.
        """
        if self.separated is not None:
            return self.separated
        if self.dim == 1:
            return (self,)
        return None

    def is_symmetric(self, tol: float = 1e-14) -> bool:
        for t, w in zip(self.atoms, self.weights):
            hit = np.all(np.abs(self.atoms + t) <= tol, axis=1)
            if not np.any(np.abs(self.weights[hit] - w) <= tol):
                return False
        return True

    def to_dict(self) -> dict:
        out = {
            "dim": self.dim,
            "width": self.width,
            "atoms": self.atoms.tolist(),
            "weights": self.weights.tolist(),
        }
        if self.separated is not None:
            out["separated"] = [
                {"atoms": f.atoms[:, 0].tolist(), "weights": f.weights.tolist()}
                for f in self.separated
            ]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SamplingMeasure":
        width = float(data["width"])
        if data.get("separated"):
            factors = [
                make_measure(1, width, np.asarray(f["atoms"], float).reshape(-1, 1), f["weights"])
                for f in data["separated"]
            ]
            m = tensor_measure(factors)
            if "atoms" in data:
                _check_tensor_match(m, np.asarray(data["atoms"], float), np.asarray(data["weights"], float))
            return m
        return make_measure(int(data["dim"]), width, data["atoms"], data["weights"])


def make_measure(dim: int, width: float, atoms, weights) -> SamplingMeasure:
    """Validate and build a discrete probability measure.

    Weights whose sum is within ``1e-9`` of one are silently renormalized;
    anything further off raises :class:`WeightsNotProbability`.
    """
    if int(dim) != dim or dim < 1:
        raise DomainError(f"dim must be a positive integer, got {dim!r}")
    if not (width > 0 and math.isfinite(width)):
        raise DomainError(f"width must be positive and finite, got {width!r}")
    dim = int(dim)
    width = float(width)
    atoms = np.asarray(atoms, dtype=float)
    if atoms.ndim == 1 and dim == 1:
        atoms = atoms.reshape(-1, 1)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if atoms.ndim != 2 or atoms.shape[1] != dim:
        raise DomainError(f"atoms must have shape (n, {dim}), got {atoms.shape}")
    if atoms.shape[0] != weights.shape[0] or atoms.shape[0] == 0:
        raise DomainError("atoms and weights must be non-empty and of equal length")
    if not np.all(np.isfinite(atoms)):
        raise AtomOutOfCube("atoms must be finite")
    half = width / 2
    outside = np.any(np.abs(atoms) > half, axis=1)
    if np.any(outside):
        bad = atoms[np.argmax(outside)].tolist()
        raise AtomOutOfCube(f"atom {bad} lies outside [-{half}, {half}]^{dim}")
    if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
        raise WeightsNotProbability("weights must be strictly positive and finite")
    total = math.fsum(weights)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise WeightsNotProbability(f"weights sum to {total!r}, expected 1")
    weights = weights / total
    atoms.setflags(write=False)
    weights.setflags(write=False)
    return SamplingMeasure(dim, width, atoms, weights)


def tensor_measure(measures_1d: Sequence[SamplingMeasure]) -> SamplingMeasure:
    """Tensor product of one-dimensional measures sharing a common width."""
    measures_1d = list(measures_1d)
    if not measures_1d:
        raise DomainError("need at least one factor")
    for m in measures_1d:
        if m.dim != 1:
            raise DomainError("tensor factors must be one-dimensional")
    width = measures_1d[0].width
    if any(m.width != width for m in measures_1d):
        raise MixedWidths(f"factor widths differ: {[m.width for m in measures_1d]}")
    if len(measures_1d) == 1:
        m = measures_1d[0]
        return SamplingMeasure(1, width, m.atoms, m.weights, (m,))

    dim = len(measures_1d)
    atoms, weights = [], []
    for combo in itertools.product(*(range(m.n_atoms) for m in measures_1d)):
        atoms.append([m.atoms[i, 0] for m, i in zip(measures_1d, combo)])
        weights.append(math.prod(m.weights[i] for m, i in zip(measures_1d, combo)))
    atoms = np.array(atoms, dtype=float)
    weights = np.array(weights, dtype=float)
    atoms.setflags(write=False)
    weights.setflags(write=False)
    return SamplingMeasure(dim, width, atoms, weights, tuple(measures_1d))


def _check_tensor_match(m: SamplingMeasure, atoms: np.ndarray, weights: np.ndarray) -> None:
    atoms = atoms.reshape(-1, m.dim)
    if atoms.shape[0] != m.n_atoms:
        raise DomainError("separated factors do not reproduce the atom list")
    used = np.zeros(m.n_atoms, dtype=bool)
    for t, w in zip(atoms, weights):
        hit = (
            np.all(np.abs(m.atoms - t) <= TENSOR_MATCH_TOL, axis=1)
            & (np.abs(m.weights - w) <= TENSOR_MATCH_TOL)
            & ~used
        )
        if not np.any(hit):
            raise DomainError(f"atom {t.tolist()} with weight {w} not produced by the separated factors")
        used[np.argmax(hit)] = True


def exp_transform(m: SamplingMeasure, xi) -> complex | np.ndarray:
    """``U(xi) = sum_a w_a exp(i <t_a, xi>)``.

    ``xi`` may be a single point of length ``dim`` or an array of shape
    ``(..., dim)``; the result has the matching leading shape.
    """
    xi = np.asarray(xi, dtype=float)
    scalar = xi.ndim <= 1
    if m.dim == 1 and xi.ndim == 0:
        xi = xi.reshape(1)
    if xi.shape[-1] != m.dim:
        raise DomainError(f"point dimension {xi.shape[-1]} does not match measure dim {m.dim}")
    phase = xi @ m.atoms.T
    out = np.exp(1j * phase) @ m.weights
    return complex(out) if scalar else out


def exp_transform_1d(m: SamplingMeasure, s: np.ndarray) -> np.ndarray:
    """Vectorized transform of a one-dimensional measure over an array of frequencies."""
    s = np.asarray(s, dtype=float)
    return np.exp(1j * np.multiply.outer(s, m.atoms[:, 0])) @ m.weights


@dataclass(frozen=True)
class MeasureConstants:
    gamma: float
    gamma_tilde: float
    width_condition_general: bool
    width_condition_separated: bool


def measure_constants(m: SamplingMeasure, delta: float) -> MeasureConstants:
    if not 0 < delta < math.pi:
        raise DomainError(f"delta must lie in (0, pi), got {delta!r}")
    return constants_for(m.dim, m.width, delta)


def constants_for(dim: int, width: float, delta: float) -> MeasureConstants:
    arg = (2 * math.pi - delta) * width
    return MeasureConstants(
        gamma=math.cos(arg * dim / 2),
        gamma_tilde=math.cos(arg / 2),
        width_condition_general=arg * dim < math.pi,
        width_condition_separated=arg < math.pi,
    )
