"""scikit-learn style wrappers around the radial solvers.

``fit`` solves for the profile; ``predict`` returns heights ``u(r)`` and
``transform`` returns ``[u, u']`` at the requested radii.  Hyperparameters
live in ``__init__`` so ``get_params``/``set_params``/``clone`` work.
"""
from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_branch, check_params, check_phi, check_radii
from .dirichlet import sign_report, solve_dirichlet_disk
from .radial import (
    SolverConfig,
    fixed_point_solve,
    initial_curvature,
    ode_residual,
    solve_shrinking,
)


class RadialWeingartenSolver(TransformerMixin, RegressorMixin, BaseEstimator):
    """Profile through the axis with ``u(0) = u'(0) = 0``.

    Parameters
    ----------
    a, b : float
        Coefficients of ``2aH + bK = phi(nu)``.
    phi : str, float or Phi
        Right-hand side; strings use ``const:<c>``, ``identity`` or
        ``poly:<c0>,<c1>,...``.
    branch : {"plus", "minus"}
    R, n, tol, max_iter, slope_cap
        Solver settings, see :class:`~weingarten.radial.SolverConfig`.
    auto_shrink : bool
        Halve ``R`` (up to 8 times) when the iteration fails to converge.
    """

    def __init__(self, a=1.0, b=0.0, phi="const:1", branch="plus", R=0.5, n=512,
                 tol=1e-10, max_iter=200, slope_cap=1e3, auto_shrink=False):
        self.a = a
        self.b = b
        self.phi = phi
        self.branch = branch
        self.R = R
        self.n = n
        self.tol = tol
        self.max_iter = max_iter
        self.slope_cap = slope_cap
        self.auto_shrink = auto_shrink

    def _config(self):
        return SolverConfig(R=float(self.R), n=self.n, tol=self.tol,
                            max_iter=self.max_iter, slope_cap=self.slope_cap)

    def _solve(self, params, phi, branch):
        if self.auto_shrink:
            return solve_shrinking(params, phi, branch, self._config())
        return fixed_point_solve(params, phi, branch, self._config())

    def fit(self, X=None, y=None):
        """Solve; ``X`` and ``y`` are ignored."""
        self.params_ = check_params(self.a, self.b)
        self.phi_ = check_phi(self.phi)
        self.branch_ = check_branch(self.branch)
        self.solution_ = self._solve(self.params_, self.phi_, self.branch_)
        self.n_iter_ = self.solution_.iterations
        self.radius_ = self.solution_.R
        self.initial_curvature_ = initial_curvature(self.params_, self.phi_, self.branch_)
        self.residual_ = ode_residual(self.params_, self.phi_, self.solution_)
        sol = self.solution_
        self._interp = CubicHermiteSpline(sol.r, sol.u, sol.du)
        return self

    def transform(self, X):
        """Columns ``u(r)`` and ``u'(r)`` at the radii in ``X``."""
        check_is_fitted(self, "solution_")
        r = check_radii(X, self.radius_)
        r = np.minimum(r, self.radius_)
        return np.column_stack([self._interp(r), self._interp(r, 1)])

    def predict(self, X):
        return self.transform(X)[:, 0]


class DirichletDiskSolver(RadialWeingartenSolver):
    """Radial solution on the disk of radius ``R`` with zero boundary values.

    ``fp_radius`` caps the fixed-point interval; beyond it the profile is
    continued by Runge-Kutta steps.
    """

    def __init__(self, a=1.0, b=0.0, phi="const:1", branch="plus", R=0.5, n=512,
                 tol=1e-10, max_iter=200, slope_cap=1e3, auto_shrink=False, fp_radius=None):
        super().__init__(a=a, b=b, phi=phi, branch=branch, R=R, n=n, tol=tol,
                         max_iter=max_iter, slope_cap=slope_cap, auto_shrink=auto_shrink)
        self.fp_radius = fp_radius

    def _solve(self, params, phi, branch):
        fp = float(self.R if self.fp_radius is None else self.fp_radius)
        config = SolverConfig(R=fp, n=self.n, tol=self.tol,
                              max_iter=self.max_iter, slope_cap=self.slope_cap)
        return solve_dirichlet_disk(params, phi, branch, float(self.R), config)

    def fit(self, X=None, y=None):
        super().fit(X, y)
        self.sign_report_ = sign_report(self.solution_)
        return self
