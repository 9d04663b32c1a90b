"""Profile CSV, JSON reports, OBJ files and key=value config files."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .core import Branch, Phi, WeingartenParams
from .errors import BadInput
from .radial import Provenance, RadialSolution

CSV_HEADER = ("r", "u", "du")


def atomic_write(path, text: str) -> None:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def profile_to_csv(sol: RadialSolution) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    # repr round-trips doubles exactly
    for r, u, du in zip(sol.r.tolist(), sol.u.tolist(), sol.du.tolist()):
        writer.writerow((repr(r), repr(u), repr(du)))
    return buf.getvalue()


def write_profile_csv(path, sol: RadialSolution) -> None:
    atomic_write(path, profile_to_csv(sol))


def read_profile_csv(path, params: WeingartenParams, phi: Phi,
                     branch=Branch.PLUS) -> RadialSolution:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(c.strip() for c in rows[0]) != CSV_HEADER:
        raise BadInput(f"{path}: expected header r,u,du")
    try:
        data = np.array([[float(c) for c in row] for row in rows[1:] if row], dtype=float)
    except ValueError as exc:
        raise BadInput(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != 3:
        raise BadInput(f"{path}: expected three columns")
    r, u, du = data.T
    prov = Provenance.FIXED_POINT if (r[0] == 0 and u[0] == 0 and du[0] == 0) else Provenance.CONTINUED
    return RadialSolution(r, u, du, params, phi, branch, prov, offset=0.0)


def solve_report(*, params: WeingartenParams, phi: Phi, branch, classification, grid,
                 iterations, residual, initial_curvature, status, **extra) -> dict:
    """Report dict in the fixed key order used by every subcommand."""
    report = {
        "params": {"a": params.a, "b": params.b},
        "phi": str(phi),
        "branch": Branch.coerce(branch).value,
        "classification": classification,
        "grid": grid,
        "iterations": iterations,
        "residual": residual,
        "initial_curvature": initial_curvature,
        "status": status,
    }
    report.update(extra)
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=True) + "\n"


def write_report(path, report: dict) -> None:
    atomic_write(path, dumps(report))


def write_obj(path, mesh) -> None:
    atomic_write(path, mesh.to_obj())


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise BadInput(f"{path}:{lineno}: expected key=value")
            out[key.strip().replace("_", "-")] = value.strip()
    return out
