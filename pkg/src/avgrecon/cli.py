"""Command-line front end.

Subcommands ``bounds``, ``kernel``, ``reconstruct`` and ``experiment`` read a JSON
config and write CSV. Exit codes: 0 success, 2 validation failure, 3 bound
violation, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import io as aio
from .errors import NumericalError, ValidationError
from .measure import SamplingMeasure
from .oracle import BandlimitedTestFunction, exact_average_samples
from .quadrature import DEFAULT_ORDER
from .reconstruct import (
    DEFAULT_GRID,
    error_bound,
    make_plan,
    make_plan_kernel,
    probe_axis,
    reconstruct_grid,
    sup_error,
)
from .window import make_window
from .kernel import ReconstructionKernel

log = logging.getLogger("avgrecon")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BOUND = 3
EXIT_NUMERICAL = 4


class ConfigError(ValidationError):
    pass


@dataclass
class ExperimentConfig:
    mode: str
    d: int
    delta: float
    sigma: float
    measure: SamplingMeasure
    test_function: Optional[BandlimitedTestFunction] = None
    n_list: list = field(default_factory=list)
    grid_points_per_axis: int = DEFAULT_GRID
    quad_order: int = DEFAULT_ORDER
    kernel: dict = field(default_factory=dict)
    out: Optional[str] = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            cfg = cls(
                mode=data["mode"],
                d=int(data["d"]),
                delta=float(data["delta"]),
                sigma=float(data["sigma"]),
                measure=SamplingMeasure.from_dict(data["measure"]),
                test_function=(
                    BandlimitedTestFunction.from_dict(data["test_function"])
                    if data.get("test_function") is not None
                    else None
                ),
                n_list=[int(n) for n in data.get("n_list", [])],
                grid_points_per_axis=int(data.get("grid_points_per_axis", DEFAULT_GRID)),
                quad_order=int(data.get("quad_order", DEFAULT_ORDER)),
                kernel=dict(data.get("kernel", {})),
                out=data.get("out"),
            )
        except KeyError as exc:
            raise ConfigError(f"config is missing required key {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ConfigError(f"malformed config: {exc}") from None
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.measure.dim != self.d:
            raise ConfigError(f"measure has dim {self.measure.dim}, config says d = {self.d}")
        if self.measure.width != self.sigma:
            raise ConfigError(f"measure width {self.measure.width} differs from sigma {self.sigma}")
        if self.test_function is not None:
            if self.test_function.dim != self.d:
                raise ConfigError("test function dimension differs from d")
            if self.test_function.delta != self.delta:
                raise ConfigError("test function bandwidth differs from delta")
        if self.n_list != sorted(self.n_list):
            raise ConfigError(f"n_list must be sorted ascending, got {self.n_list}")
        if self.grid_points_per_axis < 2:
            raise ConfigError("grid_points_per_axis must be at least 2")
        for n in self.n_list:
            make_plan(self.mode, n, self.d, self.delta, self.sigma, self.measure)

    def plan(self, n: int):
        return make_plan(self.mode, n, self.d, self.delta, self.sigma, self.measure)


def load_config(args) -> ExperimentConfig:
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if args.mode:
        data["mode"] = args.mode
    if args.grid is not None:
        data["grid_points_per_axis"] = args.grid
    if args.quad_order is not None:
        data["quad_order"] = args.quad_order
    return ExperimentConfig.from_dict(data)


def cmd_bounds(cfg: ExperimentConfig) -> str:
    rows = []
    for n in cfg.n_list:
        p = cfg.plan(n)
        rows.append([n, p.min_n, p.gamma, p.lam, p.rho, p.k, int(p.k_capped), p.bound_const, error_bound(p, 1.0)])
    buf = io.StringIO()
    aio.write_csv(rows, ["n", "min_n", "gamma", "lambda", "rho", "k", "k_capped", "C", "bound"], buf)
    return buf.getvalue()


def cmd_experiment(cfg: ExperimentConfig, timing: bool = False):
    if cfg.test_function is None:
        raise ConfigError("experiment needs a test_function")
    reports = []
    for n in cfg.n_list:
        t0 = time.perf_counter()
        plan = cfg.plan(n)
        kern = make_plan_kernel(plan, cfg.measure, cfg.quad_order)
        patch = exact_average_samples(cfg.test_function, cfg.measure, n)
        rep = sup_error(plan, patch, kern, cfg.test_function, cfg.grid_points_per_axis)
        if timing:
            rep = type(rep)(**{**rep.__dict__, "wall_ms": 1e3 * (time.perf_counter() - t0)})
        log.info("n=%d k=%d sup_error=%.3e bound=%.3e", n, rep.k, rep.sup_error, rep.bound)
        reports.append(rep)
    return aio.report_csv(reports, timing), any(r.ratio > 1 for r in reports)


def _kernel_for(cfg: ExperimentConfig) -> ReconstructionKernel:
    spec = cfg.kernel
    n = int(spec.get("n", cfg.n_list[0] if cfg.n_list else 0))
    if "k" in spec:
        window = make_window(int(spec["k"]), cfg.delta, cfg.mode, cfg.d)
        return ReconstructionKernel(cfg.measure, window, cfg.mode, cfg.quad_order)
    if n < 1:
        raise ConfigError("kernel dump needs kernel.k, kernel.n or a non-empty n_list")
    return make_plan_kernel(cfg.plan(n), cfg.measure, cfg.quad_order)


def cmd_kernel(cfg: ExperimentConfig) -> str:
    kern = _kernel_for(cfg)
    grid = cfg.kernel.get("offsets", {"start": -10, "stop": 10, "num": 41})
    axis = np.linspace(float(grid["start"]), float(grid["stop"]), int(grid["num"]))
    values = kern.grid([axis] * cfg.d)
    pts = np.stack(np.meshgrid(*([axis] * cfg.d), indexing="ij"), axis=-1).reshape(-1, cfg.d)
    return aio.kernel_csv(pts, values.reshape(-1))


def cmd_reconstruct(cfg: ExperimentConfig, patch_path: str) -> str:
    patch = aio.load_patch(patch_path)
    if patch.d != cfg.d:
        raise ConfigError(f"patch dimension {patch.d} differs from config d = {cfg.d}")
    plan = cfg.plan(patch.n)
    kern = make_plan_kernel(plan, cfg.measure, cfg.quad_order)
    axis = probe_axis(cfg.grid_points_per_axis)
    values = reconstruct_grid(plan, patch, kern, [axis] * cfg.d)
    pts = np.stack(np.meshgrid(*([axis] * cfg.d), indexing="ij"), axis=-1).reshape(-1, cfg.d)
    buf = io.StringIO()
    header = [f"x_{l + 1}" for l in range(cfg.d)] + ["value"]
    aio.write_csv((list(p) + [v] for p, v in zip(pts, values.reshape(-1))), header, buf)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avgrecon", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("bounds", "kernel", "reconstruct", "experiment"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", help="output CSV path (default: config 'out' or stdout)")
        p.add_argument("--mode", choices=["general", "separated"])
        p.add_argument("--grid", type=int, help="probe points per axis")
        p.add_argument("--quad-order", type=int, dest="quad_order")
        if name == "reconstruct":
            p.add_argument("--patch", required=True, help="SamplePatch JSON path")
        if name == "experiment":
            p.add_argument("--timing", action="store_true", help="append a wall_ms column")
    return parser


def _thread_limit():
    raw = os.environ.get("AVGRECON_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"AVGRECON_THREADS must be an integer, got {raw!r}") from None
    if n <= 0:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    status = EXIT_OK
    try:
        with _thread_limit():
            cfg = load_config(args)
            if args.command == "bounds":
                text = cmd_bounds(cfg)
            elif args.command == "kernel":
                text = cmd_kernel(cfg)
            elif args.command == "reconstruct":
                text = cmd_reconstruct(cfg, args.patch)
            else:
                text, violated = cmd_experiment(cfg, args.timing)
                if violated:
                    print("error: measured sup error exceeds the theoretical bound", file=sys.stderr)
                    status = EXIT_BOUND
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    out = args.out or cfg.out
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
