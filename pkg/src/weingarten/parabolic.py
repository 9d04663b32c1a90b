"""Closed-form solutions of the parabolic case ``2aH - K = a**2``.

Every radial solution is an arc of a circle of radius ``1/a``,

    u(r) = sign * sqrt(1 - (a*r + k)**2) / a + m,

on ``{r > 0 : |a*r + k| < 1}``, or the vertical line ``r = 1/a``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import TOL_CLASS, Branch, Phi, WeingartenParams
from .errors import BadInput, EmptyDomain, NotParabolic, ZeroB
from .radial import Provenance, RadialSolution

EDGE_FRACTION = 1e-6
# nodes near the axis carry kappa2 ~ k/r, which amplifies rounding in kappa1
AXIS_INSET = 1e-4


class ArcClass(str, enum.Enum):
    MINOR_ARC = "minor_arc"
    HALF_CIRCLE = "half_circle"
    MAJOR_ARC = "major_arc"
    TANGENT_CIRCLE = "tangent_circle"
    TORUS_CIRCLE = "torus_circle"
    CYLINDER_LINE = "cylinder_line"
    EMPTY = "empty"


def normalize_parabolic(a0: float, b0: float, c0_rhs: float, tol_class: float = TOL_CLASS):
    """Rescale ``2*a0*H + b0*K = c0`` to ``2aH - K = a**2`` with ``a > 0``.

    Returns ``(a, -1.0, a*a)``.
    """
    if b0 == 0.0:
        raise ZeroB("a parabolic relation needs b != 0")
    d = a0 * a0 + b0 * c0_rhs
    if abs(d) > tol_class * max(a0 * a0, abs(b0 * c0_rhs)):
        raise NotParabolic(f"a^2 + b*c = {d:.6g} is not zero")
    a = abs(a0 / b0)
    return a, -1.0, a * a


@dataclass(frozen=True)
class CircleSolution:
    a: float
    k: float
    m: float = 0.0
    sign: Branch = Branch.MINUS

    def __post_init__(self):
        if not self.a > 0:
            raise BadInput(f"a must be positive, got {self.a}")
        for name in ("a", "k", "m"):
            if not math.isfinite(getattr(self, name)):
                raise BadInput(f"{name} must be finite")
        object.__setattr__(self, "sign", Branch.coerce(self.sign))

    @property
    def radius(self) -> float:
        return 1.0 / self.a

    @property
    def center(self):
        return (-self.k / self.a, self.m)

    def domain(self):
        """Closure ``[lo, hi]`` of the open r-interval, or None when empty."""
        if self.k >= 1.0:
            return None
        lo = max(0.0, (-1.0 - self.k) / self.a)
        hi = (1.0 - self.k) / self.a
        return lo, hi

    def params(self) -> WeingartenParams:
        """Coefficients for which this graph (normal pointing up) is a solution.

        With the upward normal the lower arc (Minus) has meridian curvature
        ``+a`` and solves ``2aH - K = a**2``.  The upper arc solves it only
        after reversing orientation, which is the same relation with ``-a``
        (``K`` and the constant ``a**2`` do not change).
        """
        return WeingartenParams(-self.sign.sign * self.a, -1.0)

    def phi(self) -> Phi:
        return Phi.constant(self.a * self.a)

    def evaluate(self, r):
        """``(u, u', u'')`` at radii inside the open domain."""
        r = np.asarray(r, dtype=float)
        s = self.sign.sign
        x = self.a * r + self.k
        w = 1.0 - x * x
        sw = np.sqrt(w)
        u = s * sw / self.a + self.m
        du = -s * x / sw
        ddu = -s * self.a / (w * sw)
        return u, du, ddu


def circle_profile(csol: CircleSolution, n: int = 256,
                   edge_fraction: float = EDGE_FRACTION) -> RadialSolution:
    """Sample ``n + 1`` nodes of the arc, inset from both domain ends.

    The inset is ``edge_fraction`` times the domain length; the slope is
    infinite where ``|a*r + k| = 1``.  When the arc meets the axis at a
    finite slope (``-1 < k < 1``) the first node sits ``AXIS_INSET / a``
    off the axis instead (at most a quarter of the domain), which keeps the
    floating-point residual there near 1e-10.  Derivatives are stored in
    closed form.
    """
    dom = csol.domain()
    if dom is None:
        raise EmptyDomain(f"k = {csol.k} >= 1 leaves no r > 0 with |a r + k| < 1")
    lo, hi = dom
    length = hi - lo
    delta = edge_fraction * length
    delta_lo = delta
    if lo == 0.0 and csol.k > -1.0:
        delta_lo = max(delta, min(AXIS_INSET / csol.a, 0.25 * length))
    r = np.linspace(lo + delta_lo, hi - delta, int(n) + 1)
    u, du, ddu = csol.evaluate(r)
    return RadialSolution(r, u, du, csol.params(), csol.phi(), csol.sign,
                          Provenance.CLOSED_FORM, ddu=ddu)


def classify_arc(a: float, k: float, tol_class: float = TOL_CLASS) -> ArcClass:
    if not a > 0:
        raise BadInput("a must be positive")
    if k >= 1.0:
        return ArcClass.EMPTY
    if 1.0 - k < tol_class:
        # numerically k == 1: empty only when the domain is shorter than the inset
        if (1.0 - k) / a < EDGE_FRACTION:
            return ArcClass.EMPTY
        return ArcClass.MINOR_ARC
    if k > 0.0:
        return ArcClass.MINOR_ARC
    if k == 0.0:
        return ArcClass.HALF_CIRCLE
    if k > -1.0:
        return ArcClass.MAJOR_ARC
    if k == -1.0:
        return ArcClass.TANGENT_CIRCLE
    return ArcClass.TORUS_CIRCLE


@dataclass(frozen=True)
class CylinderProfile:
    """The vertical line ``r = 1/a``: a cylinder, not a graph over r."""

    a: float
    height: float
    n: int = 2

    def __post_init__(self):
        if not self.a > 0:
            raise BadInput("a must be positive")
        if int(self.n) < 2:
            raise BadInput("n must be >= 2")

    @property
    def r0(self) -> float:
        return 1.0 / self.a

    @property
    def points(self) -> np.ndarray:
        z = np.linspace(0.0, self.height, int(self.n))
        return np.column_stack([np.full(z.size, self.r0), z])

    @property
    def H(self) -> float:
        return 1.0 / (2.0 * self.r0)

    @property
    def K(self) -> float:
        return 0.0

    def relation_lhs(self) -> float:
        return 2.0 * self.a * self.H - self.K


def cylinder_profile(a: float, height: float = 1.0, n: int = 2) -> CylinderProfile:
    return CylinderProfile(a, height, n)


@dataclass(frozen=True)
class Polyline:
    """Parametric (r, z) profile curve; ``closed`` joins the last point to the first."""

    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise BadInput("points must be an (N, 2) array of (r, z)")
        if np.any(pts[:, 0] < 0):
            raise BadInput("profile radii must be non-negative")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


def stitch_circle(a: float, k: float, m: float = 0.0, n: int = 128) -> Polyline:
    """Union of the Plus and Minus arcs as one polyline over the closed domain.

    Sampled by the angle about the center so the vertical tangents are
    included exactly; axis points are snapped to ``r = 0``.  Circles with
    ``k < -1`` come back closed.
    """
    dom = CircleSolution(a, k, m).domain()
    if dom is None:
        raise EmptyDomain(f"k = {k} >= 1")
    cr, cz = -k / a, m
    rad = 1.0 / a
    if k < -1.0:
        t = np.linspace(0.0, 2 * np.pi, int(n), endpoint=False)
        pts = np.column_stack([cr + rad * np.cos(t), cz + rad * np.sin(t)])
        return Polyline(pts, closed=True)
    # the part with r >= 0 is cos(t) >= k
    t_edge = math.acos(k)
    t = np.linspace(t_edge, -t_edge, int(n) + 1)
    pts = np.column_stack([cr + rad * np.cos(t), cz + rad * np.sin(t)])
    pts[0, 0] = pts[-1, 0] = 0.0
    if k == -1.0:
        pts = pts[:-1]
        return Polyline(pts, closed=True)
    return Polyline(pts, closed=False)
