"""Argument checks shared by the estimators and the CLI."""
from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .core import Branch, Phi, WeingartenParams
from .errors import BadInput


def check_phi(phi) -> Phi:
    if isinstance(phi, Phi):
        return phi
    if isinstance(phi, str):
        return Phi.parse(phi)
    if isinstance(phi, (int, float)):
        return Phi.constant(float(phi))
    if callable(phi):
        return Phi.from_callable(phi)
    raise BadInput(f"cannot interpret phi={phi!r}")


def check_params(a, b) -> WeingartenParams:
    try:
        return WeingartenParams(float(a), float(b))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, BadInput):
            raise
        raise BadInput(f"a and b must be real numbers: {exc}") from None


def check_branch(branch) -> Branch:
    return Branch.coerce(branch)


def check_radii(X, R=None) -> np.ndarray:
    """Radii as a 1-d float array from shape (n,) or (n, 1) input."""
    arr = check_array(X, ensure_2d=False, dtype=np.float64, input_name="X")
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"expected a single column of radii, got shape {arr.shape}")
        arr = arr[:, 0]
    if np.any(arr < 0):
        raise ValueError("radii must be non-negative")
    if R is not None and np.any(arr > R * (1 + 1e-12)):
        raise ValueError(f"radii beyond the solved interval [0, {R:g}]")
    return arr
