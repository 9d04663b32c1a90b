import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from conftest import radius2_sphere, unit_sphere
from weingarten import (
    LCG64,
    Branch,
    DegenerateParabolic,
    NoSolution,
    NonConvergence,
    Phi,
    Provenance,
    RadialSolution,
    SolverConfig,
    WeingartenParams,
    apply_T,
    continue_ode,
    estimate_contraction,
    fixed_point_solve,
    initial_curvature,
    ode_residual,
    solve_shrinking,
)
from weingarten.errors import BadInput, RadicandNegative

P = WeingartenParams


# -- initial curvature ---------------------------------------------------------

@pytest.mark.parametrize("a, b, c, expected", [
    (1.0, 1.0, 0.0, 0.0),
    (1.0, 1.0, 3.0, 1.0),
    (1.0, 0.0, 1.0, 0.5),
])
def test_initial_curvature_examples(a, b, c, expected):
    assert initial_curvature(P(a, b), Phi.constant(c), Branch.PLUS) == expected


def test_initial_curvature_hyperbolic():
    with pytest.raises(NoSolution):
        initial_curvature(P(1.0, -1.0), Phi.constant(2.0), Branch.PLUS)


@settings(max_examples=200, deadline=None)
@given(a=st.floats(-5, 5).filter(lambda x: abs(x) > 1e-2),
       b=st.floats(-5, 5).filter(lambda x: abs(x) > 1e-2),
       c=st.floats(-5, 5))
def test_branch_roots(a, b, c):
    params, phi = P(a, b), Phi.constant(c)
    if a * a + b * c < 1e-9:
        return
    plus = initial_curvature(params, phi, Branch.PLUS)
    minus = initial_curvature(params, phi, Branch.MINUS)
    # both roots of b x^2 + 2a x - c, independent of the closed form
    roots = np.sort(np.roots([b, 2 * a, -c]).real)
    np.testing.assert_allclose(np.sort([plus, minus]), roots, rtol=1e-7, atol=1e-9)
    assert plus + minus == pytest.approx(-2 * a / b, rel=1e-9, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(a=st.floats(-5, 5).filter(lambda x: abs(x) > 1e-2),
       b=st.floats(-5, 5).filter(lambda x: abs(x) > 1e-2),
       t=st.floats(1e-3, 5))
def test_hyperbolic_rejected_before_iterating(a, b, t):
    import weingarten.radial as radial

    c = -(a * a + t) / b

    def boom(*args, **kwargs):
        raise AssertionError("operator applied on a hyperbolic axis")

    with pytest.MonkeyPatch.context() as mp:
        mp.setattr(radial, "_solve_T", boom)
        with pytest.raises(NoSolution):
            fixed_point_solve(P(a, b), Phi.constant(c), Branch.PLUS, SolverConfig(R=0.1, n=16))


def test_parabolic_axis_rejected():
    with pytest.raises(DegenerateParabolic) as info:
        fixed_point_solve(P(1.0, -1.0), Phi.constant(1.0))
    assert info.value.r_star == 0.0


# -- operator ------------------------------------------------------------------

def quadratic_oracle(a, b, I, r, sign):
    """Root of (b/(2a)) X^2 + r X - I = 0 by numpy.roots, one node at a time."""
    out = []
    for ri, Ii in zip(r, I):
        if ri == 0:
            out.append(0.0)
            continue
        roots = np.roots([b / (2 * a), ri, -Ii]).real
        out.append(roots[np.argmin(np.abs(roots))] if sign > 0 else roots[np.argmax(np.abs(roots))])
    return np.array(out)


def test_apply_T_sphere_data():
    r = np.linspace(0, 0.1, 41)
    out = apply_T(P(1, 1), Phi.constant(3.0), Branch.PLUS, r, np.zeros_like(r))
    X = quadratic_oracle(1.0, 1.0, 1.5 * r * r, r, +1)
    np.testing.assert_allclose(X, r, atol=1e-9)
    # the trapezoid rule is exact on the linear integrand r * 3
    np.testing.assert_allclose(out, r / np.sqrt(1 - r * r), rtol=1e-12, atol=1e-15)


def test_apply_T_mean_curvature():
    r = np.linspace(0, 0.1, 41)
    out = apply_T(P(1, 0), Phi.constant(1.0), Branch.PLUS, r, np.zeros_like(r))
    np.testing.assert_allclose(out, (r / 2) / np.sqrt(1 - r * r / 4), rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("branch", list(Branch))
def test_apply_T_zero_phi(branch):
    r = np.linspace(0, 0.2, 33)
    du = np.sin(5 * r) * 0.3
    out = apply_T(P(1, 1), Phi.constant(0.0), Branch.PLUS, r, du)
    assert np.all(out == 0.0)


def test_apply_T_radicand():
    # elliptic at the axis (phi(1) = 0.5) but steep slopes push nu towards 0
    r = np.linspace(0, 1.0, 31)
    du = np.full_like(r, 20.0)
    du[0] = 0.0
    with pytest.raises(RadicandNegative) as info:
        apply_T(P(1, -1), Phi.polynomial([2.0, -1.5]), Branch.PLUS, r, du)
    assert info.value.r_star > 0


def test_apply_T_rejects_grid():
    with pytest.raises(BadInput):
        apply_T(P(1, 1), Phi.constant(1.0), Branch.PLUS, [0.1, 0.2], [0, 0])


# -- fixed point ---------------------------------------------------------------

def test_sphere_mean_curvature(mean_cap):
    assert mean_cap.provenance is Provenance.FIXED_POINT
    assert np.max(np.abs(mean_cap.u - radius2_sphere(mean_cap.r))) <= 1e-6


def test_sphere_linear_weingarten(unit_cap):
    assert np.max(np.abs(unit_cap.u - unit_sphere(unit_cap.r))) <= 1e-6


def test_zero_solution():
    sol = fixed_point_solve(P(1, 1), Phi.constant(0.0), config=SolverConfig(R=0.3, n=64))
    assert np.all(sol.u == 0) and np.all(sol.du == 0)
    assert ode_residual(P(1, 1), Phi.constant(0.0), sol).max_abs == 0.0


@pytest.mark.parametrize("params, phi, branch", [
    (P(1, 1), Phi.constant(3.0), Branch.PLUS),
    (P(1, 0), Phi.identity(), Branch.PLUS),
    (P(2, -1), Phi.polynomial([1.0, 0.5]), Branch.PLUS),
    (P(1, 1), Phi.polynomial([2.0, 1.0]), Branch.MINUS),
    (P(-1, 2), Phi.constant(1.0), Branch.PLUS),
])
def test_fixed_point_consistency(params, phi, branch):
    cfg = SolverConfig(R=0.2, n=256, tol=1e-11)
    sol = fixed_point_solve(params, phi, branch, cfg)
    assert np.max(np.abs(apply_T(params, phi, branch, sol.r, sol.du) - sol.du)) <= 10 * cfg.tol
    # leading coefficient of a quadratic fit on the first five nodes
    c2 = np.polyfit(sol.r[:5], sol.u[:5], 2)[0]
    c0 = initial_curvature(params, phi, branch)
    assert abs(c2 - c0 / 2) <= 0.05 * abs(c0 / 2)


def test_minus_branch_is_the_other_sphere():
    # a=1, b=1, phi=3: roots 1 and -3; the minus root is the sphere of radius 1/3
    sol = fixed_point_solve(P(1, 1), Phi.constant(3.0), Branch.MINUS, SolverConfig(R=0.1, n=256))
    exact = -(1 / 3 - np.sqrt(1 / 9 - sol.r ** 2))
    assert np.max(np.abs(sol.u - exact)) <= 1e-6


def test_nonconvergence_and_shrinking():
    params, phi = P(1, 0), Phi.identity()
    with pytest.raises(NonConvergence) as info:
        fixed_point_solve(params, phi, config=SolverConfig(R=1.0, n=64, max_iter=3))
    assert info.value.iterations == 3
    sol = solve_shrinking(params, phi, config=SolverConfig(R=1.0, n=64, max_iter=6))
    assert sol.R == 0.25


@settings(max_examples=25, deadline=None)
@given(c=st.floats(-100, 100))
def test_vertical_translation_equivariance(c, unit_cap):
    moved = unit_cap.shifted(c)
    assert moved.offset == c
    a = ode_residual(unit_cap.params, unit_cap.phi, unit_cap).per_node
    b = ode_residual(moved.params, moved.phi, moved).per_node
    assert np.array_equal(a, b)


# -- residual ------------------------------------------------------------------

def test_residual_sphere_and_corrupted(unit_cap):
    params, phi = unit_cap.params, unit_cap.phi
    r = unit_cap.r
    exact = RadialSolution(r, unit_sphere(r), r / np.sqrt(1 - r * r), params, phi,
                           Branch.PLUS, Provenance.FIXED_POINT)
    assert ode_residual(params, phi, exact).max_abs <= 1e-4
    bad = RadialSolution(r, 1.1 * exact.u, 1.1 * exact.du, params, phi,
                         Branch.PLUS, Provenance.FIXED_POINT)
    assert ode_residual(params, phi, bad).max_abs > 0.01


def test_residual_order():
    params, phi = P(1, 1), Phi.constant(3.0)
    coarse = ode_residual(params, phi, fixed_point_solve(params, phi, config=SolverConfig(n=256)))
    fine = ode_residual(params, phi, fixed_point_solve(params, phi, config=SolverConfig(n=512)))
    assert coarse.max_abs / fine.max_abs >= 3


# -- continuation --------------------------------------------------------------

def test_continue_sphere(mean_cap):
    ext = continue_ode(mean_cap, 1.9, step=1e-3)
    assert ext.provenance is Provenance.CONTINUED
    assert ext.r[-1] == 1.9
    assert np.max(np.abs(ext.u - radius2_sphere(ext.r))) <= 1e-5


def test_continue_stops_vertical(mean_cap):
    ext = continue_ode(mean_cap, 2.5, step=1e-3)
    assert ext.stop_reason == "vertical"
    assert abs(ext.r[-1] - 2.0) < 1e-2


def test_continue_rejects_bad_target(mean_cap):
    with pytest.raises(BadInput):
        continue_ode(mean_cap, 0.4)


FOLD = (P(1.0, -1.0), Phi.polynomial([2.0, -1.5]), Branch.MINUS)


def fold_oracle():
    """First radius where a + b*k2 vanishes, from scipy in two stages.

    Starts off the axis from the quadratic germ, integrates in ``r`` while
    the factor is comfortably away from zero, then in ``p`` where ``dr/dp``
    stays regular and the fold is an ordinary event.
    """
    params, phi, branch = FOLD
    a, b = params.a, params.b
    c0 = initial_curvature(params, phi, branch)

    def factor(r, p):
        return a + b * p / (r * math.sqrt(1 + p * p))

    def num(r, p):
        return float(phi(1 / math.sqrt(1 + p * p))) - a * p / (r * math.sqrt(1 + p * p))

    def f_r(r, y):
        q = 1 + y[0] ** 2
        return [num(r, y[0]) * q ** 1.5 / factor(r, y[0])]

    near = lambda r, y: abs(factor(r, y[0])) - 0.05 * abs(factor(1e-6, c0 * 1e-6))
    near.terminal = True
    r0 = 1e-6
    first = solve_ivp(f_r, (r0, 5.0), [c0 * r0], method="DOP853", rtol=1e-12, atol=1e-14,
                      events=near)
    r1, p1 = first.t[-1], first.y[0, -1]

    def f_p(p, y):
        return [factor(y[0], p) / (num(y[0], p) * (1 + p * p) ** 1.5)]

    fold = lambda p, y: factor(y[0], p)
    fold.terminal = True
    direction = np.sign(f_r(r1, [p1])[0])
    second = solve_ivp(f_p, (p1, p1 + direction * 50), [r1], method="DOP853",
                       rtol=1e-12, atol=1e-14, events=fold)
    return float(second.y_events[0][0][0])


def test_fold_located():
    params, phi, branch = FOLD
    sol = fixed_point_solve(params, phi, branch, SolverConfig(R=0.3, n=512))
    with pytest.raises(DegenerateParabolic) as info:
        continue_ode(sol, 2.0, step=1e-3)
    assert abs(info.value.r_star - fold_oracle()) <= 1e-6
    assert info.value.partial.r[-1] <= info.value.r_star + 1e-12


# -- contraction ---------------------------------------------------------------

def test_lcg_reproducible():
    # MMIX constants, checked with plain integer arithmetic
    state, expected = 7, []
    for _ in range(3):
        state = (state * 6364136223846793005 + 1442695040888963407) % 2 ** 64
        expected.append(state)
    rng = LCG64(7)
    assert [rng.next_u64() for _ in range(3)] == expected
    np.testing.assert_array_equal(LCG64(3).uniforms(10), LCG64(3).uniforms(10))
    assert np.all((LCG64(1).uniforms(1000) >= 0) & (LCG64(1).uniforms(1000) < 1))


def test_contraction_small():
    ratio = estimate_contraction(P(1, 1), Phi.constant(3.0), Branch.PLUS, R=0.05, n=256, trials=32)
    assert ratio < 1


def test_contraction_zero_phi():
    assert estimate_contraction(P(1, 1), Phi.constant(0.0), R=0.3) == 0.0


def test_contraction_grows_with_R():
    # phi depends on nu, so T genuinely depends on its argument
    params, phi = P(1, 1), Phi.identity()
    r1 = estimate_contraction(params, phi, R=0.05)
    r2 = estimate_contraction(params, phi, R=0.1)
    assert 0 < r1 < r2 < 1
    assert 1.5 < r2 / r1 < 2.5


def test_contraction_seeded():
    params, phi = P(1, 1), Phi.identity()
    assert estimate_contraction(params, phi, seed=5) == estimate_contraction(params, phi, seed=5)
