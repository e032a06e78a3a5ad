"""Truncated reconstruction operator, adaptive regularity and error-bound constants."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DomainError,
    IncompletePatch,
    ModeUnavailable,
    SampleCountTooSmall,
    WidthConditionViolated,
)
from .kernel import ReconstructionKernel
from .measure import SamplingMeasure, constants_for
from .oracle import BandlimitedTestFunction, SamplePatch, eval_f, l2_norm, lattice
from .quadrature import DEFAULT_ORDER
from .window import GENERAL, SEPARATED, make_window

K_CAP = 60
DEFAULT_GRID = 33
E = math.e


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d."""
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


@dataclass(frozen=True)
class ReconstructionPlan:
    mode: str
    n: int
    d: int
    delta: float
    sigma: float
    gamma: float
    rho: float
    lam: float
    k: int
    bound_const: float
    min_n: int
    k_capped: bool = False
    bound_n: Optional[int] = None

    @property
    def rate(self) -> float:
        """Guaranteed exponential rate ``1 / (e rho)``."""
        return 1 / (E * self.rho)


def general_constants(d: int, delta: float, sigma: float) -> dict:
    """Constants of the general-measure bound: gamma, rho, lambda, C and the sample threshold."""
    gamma = math.cos((2 * math.pi - delta) * sigma * d / 2)
    rho = math.sqrt(d) / 2 * (math.pi / (math.pi - delta) + 2 ** (d - 2) * d * sigma / gamma)
    lam = d * sigma * 2 ** (d - 2.5) * (math.pi - delta) / gamma
    er = E * rho
    const = (
        math.sqrt(2)
        * er ** ((d + 1) / 2)
        * math.exp(2 + 2 / er)
        * (1 + lam) ** d
        / gamma
        * (4 * math.pi - 2 * delta) ** d
        / math.pi ** (2 * d)
        * math.sqrt(2**d * sphere_area(d))
    )
    threshold = 8 / 3 + er * max(2, 2 * d / 3)
    return {"gamma": gamma, "rho": rho, "lam": lam, "C": const, "threshold": threshold}


def separated_constants(d: int, delta: float, sigma: float) -> dict:
    """Constants of the tensor-product bound (rho and lambda do not depend on d)."""
    gamma = math.cos((2 * math.pi - delta) * sigma / 2)
    rho = (gamma * math.pi + sigma * (math.pi - delta)) / (2 * gamma * (math.pi - delta))
    lam = 0.25 * math.sqrt(sigma * math.pi * (math.pi - delta) / gamma)
    er = E * rho
    const = (
        math.sqrt(2 * er)
        * math.exp(1 + 1 / er)
        * math.sqrt(d)
        * (1 + lam)
        * (4 * math.pi - 2 * delta)
        / (gamma ** ((d + 1) / 2) * math.pi ** ((d + 3) / 2))
    )
    return {"gamma": gamma, "rho": rho, "lam": lam, "C": const, "threshold": 1 + er}


def make_plan(
    mode: str,
    n: int,
    d: int,
    delta: float,
    sigma: float,
    measure: Optional[SamplingMeasure] = None,
) -> ReconstructionPlan:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if int(d) != d or d < 1:
        raise DomainError(f"d must be a positive integer, got {d!r}")
    if not 0 < delta < math.pi:
        raise DomainError(f"delta must lie in (0, pi), got {delta!r}")
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    n, d = int(n), int(d)
    if measure is not None:
        if measure.dim != d:
            raise DomainError(f"measure dimension {measure.dim} does not match d = {d}")
        if measure.width != sigma:
            raise DomainError(f"measure width {measure.width} does not match sigma = {sigma}")

    conds = constants_for(d, sigma, delta)
    if mode == GENERAL:
        if d < 2:
            raise ModeUnavailable("the general-measure construction is stated for d >= 2; use separated for d = 1")
        if not conds.width_condition_general:
            raise WidthConditionViolated(
                f"(2pi - delta) sigma d = {(2 * math.pi - delta) * sigma * d:.6g} must be < pi"
            )
        c = general_constants(d, delta, sigma)
        ineq = "n >= 8/3 + e rho max(2, 2d/3)"
        k_of = lambda m: math.ceil((m - 2) / (2 * E * c["rho"]))
        implied_n = math.floor(2 * E * c["rho"] * K_CAP + 2)
    elif mode == SEPARATED:
        if measure is not None and measure.factors() is None:
            raise ModeUnavailable("separated mode needs a tensor-product measure")
        if not conds.width_condition_separated:
            raise WidthConditionViolated(
                f"(2pi - delta) sigma = {(2 * math.pi - delta) * sigma:.6g} must be < pi"
            )
        c = separated_constants(d, delta, sigma)
        ineq = "n >= 1 + e rho~"
        k_of = lambda m: math.ceil((m - 1) / (E * c["rho"]))
        implied_n = math.floor(E * c["rho"] * K_CAP + 1)
    else:
        raise DomainError(f"unknown mode {mode!r}")

    min_n = math.ceil(c["threshold"])
    if n < c["threshold"]:
        raise SampleCountTooSmall(f"n = {n} violates {ineq} = {c['threshold']:.6g} (minimum n is {min_n})")
    k = k_of(n)
    capped = k > K_CAP
    return ReconstructionPlan(
        mode=mode,
        n=n,
        d=d,
        delta=float(delta),
        sigma=float(sigma),
        gamma=c["gamma"],
        rho=c["rho"],
        lam=c["lam"],
        k=min(k, K_CAP),
        bound_const=c["C"],
        min_n=min_n,
        k_capped=capped,
        bound_n=implied_n if capped else n,
    )


def error_bound(plan: ReconstructionPlan, f_norm: float) -> float:
    """``||f|| C / sqrt(n) exp(-n / (e rho))``, evaluated at the implied n when k is capped."""
    if f_norm < 0:
        raise DomainError("f_norm must be non-negative")
    m = plan.bound_n or plan.n
    return f_norm * plan.bound_const / math.sqrt(m) * math.exp(-m / (E * plan.rho))


def make_plan_kernel(
    plan: ReconstructionPlan, measure: SamplingMeasure, quad_order: int = DEFAULT_ORDER
) -> ReconstructionKernel:
    """Kernel whose window matches the plan's mode and regularity order."""
    window = make_window(plan.k, plan.delta, plan.mode, plan.d)
    return ReconstructionKernel(measure, window, plan.mode, quad_order)


def _check_inputs(plan: ReconstructionPlan, patch: SamplePatch, kern: ReconstructionKernel) -> None:
    if patch.d != plan.d:
        raise DomainError(f"patch dimension {patch.d} does not match plan d = {plan.d}")
    if patch.n != plan.n:
        raise IncompletePatch(f"patch covers [-{patch.n}, {patch.n}]^d but the plan needs n = {plan.n}")
    bad = np.argwhere(~np.isfinite(patch.values))
    if len(bad):
        raise IncompletePatch(f"sample for j = {(bad[0] - patch.n).tolist()} is missing")
    if kern.mode != plan.mode or kern.window.k != plan.k or kern.dim != plan.d or kern.delta != plan.delta:
        raise DomainError("kernel parameters do not match the plan")


def _check_point(x: np.ndarray) -> None:
    if not np.all((x > 0) & (x < 1)):
        raise DomainError(f"evaluation point {x.tolist()} lies outside the open unit cube")


def reconstruct_at(plan: ReconstructionPlan, patch: SamplePatch, kern: ReconstructionKernel, x) -> float:
    """``(2pi)^(-d/2) sum_j mu_j Phi(x - j)`` summed exactly-rounded in lexicographic order."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (plan.d,):
        raise DomainError(f"expected a point of dimension {plan.d}")
    _check_point(x)
    _check_inputs(plan, patch, kern)
    phi = kern.values(x[None, :] - lattice(plan.n, plan.d))
    return math.fsum(patch.flat() * phi) / (2 * math.pi) ** (plan.d / 2)


def probe_axis(grid_points_per_axis: int) -> np.ndarray:
    if grid_points_per_axis < 2:
        raise DomainError("grid_points_per_axis must be at least 2")
    return (np.arange(grid_points_per_axis) + 0.5) / grid_points_per_axis


def reconstruct_grid(
    plan: ReconstructionPlan, patch: SamplePatch, kern: ReconstructionKernel, axes
) -> np.ndarray:
    """Reconstruction on the Cartesian grid spanned by ``axes`` (one 1D array per dimension)."""
    axes = [np.asarray(a, dtype=float).reshape(-1) for a in axes]
    if len(axes) != plan.d:
        raise DomainError(f"expected {plan.d} axes")
    for a in axes:
        _check_point(a)
    _check_inputs(plan, patch, kern)
    js = np.arange(-plan.n, plan.n + 1, dtype=float)
    nj = len(js)
    offsets = [(a[:, None] - js[None, :]).reshape(-1) for a in axes]
    phi = kern.grid(offsets)
    d = plan.d
    shape = []
    for a in axes:
        shape += [len(a), nj]
    phi = phi.reshape(shape).transpose(list(range(0, 2 * d, 2)) + list(range(1, 2 * d, 2)))
    rows = phi.reshape(-1, nj**d) * patch.flat()[None, :]
    out = np.array([math.fsum(r) for r in rows]) / (2 * math.pi) ** (d / 2)
    return out.reshape([len(a) for a in axes])


@dataclass(frozen=True)
class ErrorReport:
    n: int
    k: int
    sup_error: float
    bound: float
    ratio: float
    wall_ms: Optional[float] = None


def sup_error(
    plan: ReconstructionPlan,
    patch: SamplePatch,
    kern: ReconstructionKernel,
    f: BandlimitedTestFunction,
    grid_points_per_axis: int = DEFAULT_GRID,
) -> ErrorReport:
    """Max of ``|f - A_n f|`` over the interior grid ``((i + 0.5) / G)^d`` against the bound."""
    axis = probe_axis(grid_points_per_axis)
    approx = reconstruct_grid(plan, patch, kern, [axis] * plan.d)
    pts = np.stack(np.meshgrid(*([axis] * plan.d), indexing="ij"), axis=-1)
    err = float(np.max(np.abs(eval_f(f, pts) - approx)))
    bound = error_bound(plan, l2_norm(f))
    ratio = err / bound if bound > 0 else (0.0 if err == 0 else math.inf)
    return ErrorReport(plan.n, plan.k, err, bound, ratio)


def frame_sum(patch: SamplePatch) -> float:
    """``sum_j |mu_j|^2`` over the patch."""
    return math.fsum(patch.flat() ** 2)
