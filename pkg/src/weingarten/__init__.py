"""Radial solutions of the linear Weingarten equation 2aH + bK = phi(nu)."""

__version__ = "0.1.0"

from .core import (
    Branch,
    Classification,
    GlobalClassification,
    Kind,
    Phi,
    WeingartenParams,
    classify_at,
    classify_global,
    discriminant,
    eval_phi,
)
from .dirichlet import SignReport, SignVerdict, functional_residual_2d, sign_report, solve_dirichlet_disk
from .errors import (
    BadInput,
    DegenerateParabolic,
    DegenerateParams,
    DegenerateProfile,
    DomainError,
    EmptyDomain,
    GridTooCoarse,
    NoSolution,
    NonConvergence,
    NotDirichlet,
    NotParabolic,
    RadicandNegative,
    SlopeBlowup,
    StoppedVertical,
    TooFewNodes,
    WeingartenError,
    ZeroB,
)
from .estimator import DirichletDiskSolver, RadialWeingartenSolver
from .geometry import CurvatureSample, Mesh, principal_curvatures, revolve_to_mesh, weingarten_residual
from .parabolic import (
    ArcClass,
    CircleSolution,
    CylinderProfile,
    Polyline,
    circle_profile,
    classify_arc,
    cylinder_profile,
    normalize_parabolic,
    stitch_circle,
)
from .radial import (
    LCG64,
    Provenance,
    RadialSolution,
    ResidualReport,
    SolverConfig,
    apply_T,
    continue_ode,
    estimate_contraction,
    fixed_point_solve,
    initial_curvature,
    ode_residual,
    solve_shrinking,
)
