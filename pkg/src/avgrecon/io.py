"""JSON and CSV formats for measures, patches, test functions, kernels and reports."""
from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import DomainError, IncompletePatch
from .oracle import BandlimitedTestFunction, SamplePatch, lattice
from .reconstruct import ErrorReport


def fmt(x) -> str:
    """Shortest round-trip text for a binary64 value."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def patch_to_dict(patch: SamplePatch) -> dict:
    js = lattice(patch.n, patch.d).astype(int)
    return {
        "n": patch.n,
        "d": patch.d,
        "delta": patch.delta,
        "sigma": patch.sigma,
        "values": [{"j": j.tolist(), "mu": float(mu)} for j, mu in zip(js, patch.flat())],
    }


def patch_from_dict(data: dict) -> SamplePatch:
    n, d = int(data["n"]), int(data["d"])
    values = np.full((2 * n + 1,) * d, np.nan)
    for entry in data["values"]:
        j = [int(v) for v in entry["j"]]
        if len(j) != d or any(abs(v) > n for v in j):
            raise DomainError(f"sample index {j} lies outside [-{n}, {n}]^{d}")
        values[tuple(v + n for v in j)] = float(entry["mu"])
    missing = np.argwhere(np.isnan(values))
    if len(missing):
        raise IncompletePatch(f"sample for j = {(missing[0] - n).tolist()} is missing")
    return SamplePatch(n, d, values, "external", data.get("delta"), data.get("sigma"))


def load_patch(path) -> SamplePatch:
    with open(path) as fh:
        return patch_from_dict(json.load(fh))


def dump_patch(patch: SamplePatch, path) -> None:
    with open(path, "w") as fh:
        json.dump(patch_to_dict(patch), fh)


def load_test_function(data: dict) -> BandlimitedTestFunction:
    return BandlimitedTestFunction.from_dict(data)


def write_csv(rows: Iterable[Sequence], header: Sequence[str], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def kernel_csv(offsets: np.ndarray, values: np.ndarray) -> str:
    offsets = np.asarray(offsets, dtype=float)
    d = offsets.shape[1]
    buf = io.StringIO()
    header = [f"offset_{l + 1}" for l in range(d)] + ["phi_value"]
    write_csv((list(o) + [v] for o, v in zip(offsets, values)), header, buf)
    return buf.getvalue()


REPORT_HEADER = ["n", "k", "sup_error", "bound", "ratio"]


def report_csv(reports: Sequence[ErrorReport], timing: bool = False) -> str:
    buf = io.StringIO()
    header = REPORT_HEADER + (["wall_ms"] if timing else [])
    rows = []
    for r in reports:
        row = [r.n, r.k, r.sup_error, r.bound, r.ratio]
        if timing:
            row.append(r.wall_ms)
        rows.append(row)
    write_csv(rows, header, buf)
    return buf.getvalue()
