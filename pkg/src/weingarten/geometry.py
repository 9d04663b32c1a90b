"""Curvatures of rotational graphs, the Weingarten check and mesh export."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Union

import numpy as np

from .core import Phi, WeingartenParams
from .errors import DegenerateProfile, TooFewNodes
from .parabolic import CylinderProfile, Polyline
from .radial import RadialSolution, ResidualReport, second_derivative


@dataclass(frozen=True)
class CurvatureSample:
    r: float
    kappa1: float
    kappa2: float
    H: float
    K: float
    nu: float


def curvature_arrays(sol: RadialSolution):
    """``(kappa1, kappa2, nu)`` per node; both curvatures equal ``u''(0)`` on the axis."""
    if len(sol) < 3 and sol.ddu is None:
        raise TooFewNodes("need at least 3 nodes")
    r, p = sol.r, sol.du
    ddu = second_derivative(sol)
    q = 1.0 + p * p
    sq = np.sqrt(q)
    k1 = ddu / (q * sq)
    k2 = np.empty_like(r)
    off = r > 0
    k2[off] = p[off] / (r[off] * sq[off])
    k2[~off] = ddu[~off]
    return k1, k2, 1.0 / sq


def principal_curvatures(profile: Union[RadialSolution, CylinderProfile]) -> List[CurvatureSample]:
    if isinstance(profile, CylinderProfile):
        k2 = 1.0 / profile.r0
        return [CurvatureSample(float(rr), 0.0, k2, k2 / 2, 0.0, 0.0)
                for rr, _ in profile.points]
    k1, k2, nu = curvature_arrays(profile)
    return [CurvatureSample(float(r), float(a), float(b), float((a + b) / 2), float(a * b), float(v))
            for r, a, b, v in zip(profile.r, k1, k2, nu)]


def weingarten_residual(params: WeingartenParams, phi: Phi, sol: RadialSolution) -> ResidualReport:
    """Per-node ``|2aH + bK - phi(nu)|``."""
    k1, k2, nu = curvature_arrays(sol)
    values = params.a * (k1 + k2) + params.b * (k1 * k2) - phi(nu)
    return ResidualReport.from_values(np.abs(values))


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        f = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise DegenerateProfile("face index out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    def edge_counts(self) -> dict:
        counts: dict = {}
        for tri in self.faces:
            for i, j in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (min(i, j), max(i, j))
                counts[key] = counts.get(key, 0) + 1
        return counts

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edge_counts()) + len(self.faces)

    def is_watertight(self) -> bool:
        return all(c == 2 for c in self.edge_counts().values())

    def triangle_areas(self) -> np.ndarray:
        a, b, c = (self.vertices[self.faces[:, i]] for i in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def to_obj(self) -> str:
        lines = [f"v {x!r} {y!r} {z!r}" for x, y, z in self.vertices.tolist()]
        lines += [f"f {i + 1} {j + 1} {k + 1}" for i, j, k in self.faces.tolist()]
        return "\n".join(lines) + "\n"


def _profile_points(profile):
    if isinstance(profile, RadialSolution):
        return np.column_stack([profile.r, profile.u]), False
    if isinstance(profile, CylinderProfile):
        return profile.points, False
    if isinstance(profile, Polyline):
        return profile.points, profile.closed
    pts = np.asarray(profile, dtype=float)
    return pts, False


def revolve_to_mesh(profile, n_theta: int = 64) -> Mesh:
    """Triangulate the surface swept by an (r, z) profile about the z-axis.

    Nodes on the axis become a single fan apex.  Winding is consistent
    across the surface; for a graph traversed outward the normals point up.
    """
    if int(n_theta) < 8:
        raise DegenerateProfile("n_theta must be >= 8")
    n_theta = int(n_theta)
    pts, closed = _profile_points(profile)
    if len(pts) < 2:
        raise DegenerateProfile("need at least 2 profile nodes")
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    cos, sin = np.cos(theta), np.sin(theta)
    vertices = []
    index = []
    for r, z in pts:
        if r == 0.0:
            index.append(len(vertices))
            vertices.append((0.0, 0.0, z))
        else:
            index.append(np.arange(len(vertices), len(vertices) + n_theta))
            vertices.extend(zip(r * cos, r * sin, np.full(n_theta, z)))
    nxt = np.roll(np.arange(n_theta), -1)
    faces = []
    segments = list(zip(range(len(pts) - 1), range(1, len(pts))))
    if closed:
        segments.append((len(pts) - 1, 0))
    for i, k in segments:
        A, B = index[i], index[k]
        a_ring, b_ring = isinstance(A, np.ndarray), isinstance(B, np.ndarray)
        if a_ring and b_ring:
            faces.extend(zip(A, B, B[nxt]))
            faces.extend(zip(A, B[nxt], A[nxt]))
        elif b_ring:
            faces.extend((A, B[j], B[nxt[j]]) for j in range(n_theta))
        elif a_ring:
            faces.extend((A[j], B, A[nxt[j]]) for j in range(n_theta))
    return Mesh(np.array(vertices, dtype=float), np.array(faces, dtype=np.int64))
