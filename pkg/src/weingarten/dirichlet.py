"""Radial Dirichlet problems on a disk with zero boundary values."""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .core import Branch, Phi, WeingartenParams
from .errors import BadInput, GridTooCoarse, NotDirichlet, StoppedVertical
from .radial import (
    RadialSolution,
    ResidualReport,
    SolverConfig,
    continue_ode,
    fixed_point_solve,
)


def solve_dirichlet_disk(params: WeingartenParams, phi: Phi, branch: Branch = Branch.PLUS,
                         R: float = 0.5, config: Optional[SolverConfig] = None) -> RadialSolution:
    """Radial solution on the disk of radius ``R`` vanishing on its boundary.

    The axis problem is solved by fixed-point iteration on
    ``[0, min(R, config.R)]`` and, if that is shorter than ``R``, continued
    outward.  The profile is then lowered by its boundary height; the
    equation only sees derivatives, so the translate is still a solution.
    """
    config = config or SolverConfig(R=R)
    if not R > 0:
        raise BadInput("R must be positive")
    fp_R = min(R, config.R)
    sol = fixed_point_solve(params, phi, branch, replace(config, R=fp_R))
    if fp_R < R:
        sol = continue_ode(sol, R, step=fp_R / config.n, slope_cap=config.slope_cap)
        if sol.stop_reason == "vertical":
            raise StoppedVertical(
                f"profile turns vertical at r = {sol.R:.6g} before reaching R = {R:g}",
                r_stop=sol.R, partial=sol)
    return sol.shifted(-sol.u[-1])


class SignVerdict(str, enum.Enum):
    NEGATIVE = "negative"
    POSITIVE = "positive"
    ZERO = "zero"
    MIXED = "mixed"


@dataclass(frozen=True)
class SignReport:
    verdict: SignVerdict
    extremes: Tuple[float, float]
    tau: float


def sign_tolerance(sol: RadialSolution) -> float:
    return 1e-9 * max(1.0, float(np.max(np.abs(sol.u))))


def sign_report(sol: RadialSolution, tau: Optional[float] = None) -> SignReport:
    """Constant-sign verdict on the interior nodes (all but the boundary one).

    Values within ``tau`` of zero are tolerated only in the run of nodes
    next to the boundary; a near-zero value anywhere else breaks the strict
    sign and the verdict is Mixed.
    """
    tau = sign_tolerance(sol) if tau is None else tau
    if abs(sol.u[-1]) > tau:
        raise NotDirichlet(f"boundary value {sol.u[-1]:.3g} is not zero")
    interior = sol.u[:-1]
    extremes = (float(interior.min()), float(interior.max())) if interior.size else (0.0, 0.0)
    if interior.size == 0 or np.max(np.abs(interior)) <= tau:
        return SignReport(SignVerdict.ZERO, extremes, tau)
    neg = interior < -tau
    pos = interior > tau
    if neg.any() and pos.any():
        return SignReport(SignVerdict.MIXED, extremes, tau)
    strict = neg if neg.any() else pos
    # the non-strict nodes must form a tail touching the boundary
    bad = np.flatnonzero(~strict)
    if bad.size and not np.array_equal(bad, np.arange(interior.size - bad.size, interior.size)):
        return SignReport(SignVerdict.MIXED, extremes, tau)
    return SignReport(SignVerdict.NEGATIVE if neg.any() else SignVerdict.POSITIVE, extremes, tau)


def weingarten_functional(params: WeingartenParams, phi: Phi, p, q, r, s, t):
    """Cartesian form of the equation for ``u(x, y)``.

    ``p, q`` are ``u_x, u_y`` and ``r, s, t`` are ``u_xx, u_yy, u_xy``.
    """
    w2 = 1.0 + p * p + q * q
    w = np.sqrt(w2)
    mean = ((1.0 + p * p) * s - 2.0 * p * q * t + (1.0 + q * q) * r) / (w2 * w)
    gauss = (r * s - t * t) / (w2 * w2)
    return params.a * mean + params.b * gauss - phi(1.0 / w)


def symmetric_grid(rho: float, grid_n: int) -> np.ndarray:
    k = 2.0 * np.arange(grid_n) - (grid_n - 1)
    return rho * k / (grid_n - 1)


def _d1(f, h):
    # five-point centered first derivative, fourth order
    return (f(-2) - 8.0 * f(-1) + 8.0 * f(1) - f(2)) / (12.0 * h)


def _d2(f, h):
    return (-f(-2) + 16.0 * f(-1) - 30.0 * f(0) + 16.0 * f(1) - f(2)) / (12.0 * h * h)


def functional_residual_2d(params: WeingartenParams, phi: Phi, sol: RadialSolution,
                           grid_n: int = 64, h: float = 1e-3) -> ResidualReport:
    """Check the revolved graph against the two-dimensional equation.

    ``U(x, y) = u(sqrt(x^2 + y^2))`` is sampled through a cubic spline
    clamped to the stored end slopes.  Derivatives come from five-point
    centered differences with spacing ``h``; ``u_xy`` is half the
    difference of the second derivatives along the two diagonals, so no
    sample leaves the disk of radius ``R``.  Evaluation points are the grid
    points inside the disk of radius ``R - 2h``; their coordinates are
    returned in ``coords``.
    """
    if sol.r[0] != 0.0:
        raise BadInput("profile must start on the axis")
    R = sol.R
    if not h > 0 or h >= R / 8:
        raise GridTooCoarse(f"h = {h:g} must be below R/8 = {R / 8:g}")
    if int(grid_n) < 2:
        raise BadInput("grid_n must be >= 2")
    spline = CubicSpline(sol.r, sol.u, bc_type=((1, float(sol.du[0])), (1, float(sol.du[-1]))))

    rho = R - 2.0 * h
    xs = symmetric_grid(rho, int(grid_n))
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    inside = X * X + Y * Y <= rho * rho
    x, y = X[inside], Y[inside]

    def along(dx, dy):
        return lambda m: spline(np.hypot(x + m * dx, y + m * dy))

    d = h / np.sqrt(2.0)
    p = _d1(along(h, 0.0), h)
    q = _d1(along(0.0, h), h)
    uxx = _d2(along(h, 0.0), h)
    uyy = _d2(along(0.0, h), h)
    uxy = 0.5 * (_d2(along(d, d), h) - _d2(along(d, -d), h))
    values = weingarten_functional(params, phi, p, q, uxx, uyy, uxy)
    return ResidualReport.from_values(values, coords=np.column_stack([x, y]))
