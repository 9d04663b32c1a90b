"""Radial profiles ``u(r)`` of the Weingarten relation through the axis.

In terms of ``p = u'`` the radial equation reads

    a*(k1 + k2) + b*k1*k2 = phi(nu),
    k1 = u''/(1+p^2)^(3/2),  k2 = p/(r*sqrt(1+p^2)),  nu = 1/sqrt(1+p^2),

with ``u(0) = u'(0) = 0``.  It is singular at ``r = 0``.  Multiplying by
``r`` and integrating once gives, with ``X = f(p) = p/sqrt(1+p^2)``,

    r*X + (b/(2a))*X^2 = I(r),   I(r) = int_0^r t*g(p(t)) dt,
    g(y) = phi(1/sqrt(1+y^2))/a,

which is regular at the axis.  Solving that quadratic for ``X`` and
inverting ``f`` gives the map iterated by :func:`fixed_point_solve`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .core import Branch, Kind, Phi, WeingartenParams, classify_at
from .errors import (
    BadInput,
    DegenerateParabolic,
    DegenerateParams,
    NoSolution,
    NonConvergence,
    RadicandNegative,
    SlopeBlowup,
    StoppedVertical,
    TooFewNodes,
)

TAU_DEN = 1e-10


class Provenance(str, enum.Enum):
    FIXED_POINT = "fixed_point"
    CONTINUED = "continued"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class SolverConfig:
    R: float = 0.5
    n: int = 512
    tol: float = 1e-10
    max_iter: int = 200
    slope_cap: float = 1e3

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise BadInput(f"R must be positive, got {self.R}")
        if int(self.n) != self.n or self.n < 8:
            raise BadInput(f"n must be an integer >= 8, got {self.n}")
        if not self.tol > 0:
            raise BadInput("tol must be positive")
        if int(self.max_iter) < 1:
            raise BadInput("max_iter must be >= 1")
        if not self.slope_cap > 0:
            raise BadInput("slope_cap must be positive")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "max_iter", int(self.max_iter))


def _frozen(x):
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RadialSolution:
    """Sampled profile ``(r, u, u')`` with the data it solves.

    ``ddu`` is only set for closed-form profiles; everything else
    differences ``du`` when ``u''`` is needed.  ``offset`` records vertical
    translations applied after solving (the axis height of a fixed-point
    profile).
    """

    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    params: WeingartenParams
    phi: Phi
    branch: Branch = Branch.PLUS
    provenance: Provenance = Provenance.FIXED_POINT
    ddu: Optional[np.ndarray] = None
    iterations: int = 0
    stop_reason: Optional[str] = None
    offset: float = 0.0

    def __post_init__(self):
        r, u, du = _frozen(self.r), _frozen(self.u), _frozen(self.du)
        if r.ndim != 1 or not (r.shape == u.shape == du.shape):
            raise BadInput("r, u, du must be 1-d and of equal length")
        if r.size == 0:
            raise BadInput("empty profile")
        if r[0] < 0 or np.any(np.diff(r) <= 0):
            raise BadInput("radii must be non-negative and strictly increasing")
        if not np.all(np.isfinite(du)):
            raise BadInput("slopes must be finite")
        if self.provenance is Provenance.FIXED_POINT and not (
                r[0] == 0 and u[0] == self.offset and du[0] == 0):
            raise BadInput("fixed-point profiles start at the axis with u' = 0 and u = offset")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "du", du)
        object.__setattr__(self, "branch", Branch.coerce(self.branch))
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        if self.ddu is not None:
            ddu = _frozen(self.ddu)
            if ddu.shape != r.shape:
                raise BadInput("ddu must match r")
            object.__setattr__(self, "ddu", ddu)

    def __len__(self):
        return self.r.size

    @property
    def R(self) -> float:
        return float(self.r[-1])

    def shifted(self, c: float) -> "RadialSolution":
        """Same profile translated vertically by ``c``."""
        return replace(self, u=self.u + c, offset=self.offset + c)

    def flipped(self) -> "RadialSolution":
        return replace(self, u=-self.u, du=-self.du, offset=-self.offset,
                       ddu=None if self.ddu is None else -self.ddu)


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    rms: float
    per_node: np.ndarray
    skipped_nodes: Tuple[int, ...] = ()
    coords: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def from_values(cls, values, skipped=(), coords=None) -> "ResidualReport":
        values = _frozen(values)
        keep = np.ones(values.size, dtype=bool)
        keep[list(skipped)] = False
        v = values[keep]
        if v.size == 0:
            return cls(0.0, 0.0, values, tuple(skipped), coords)
        return cls(float(np.max(np.abs(v))), float(np.sqrt(np.mean(v * v))),
                   values, tuple(int(i) for i in skipped), coords)

    def as_dict(self) -> dict:
        return {"max_abs": self.max_abs, "rms": self.rms}


# -- axis data ---------------------------------------------------------------

def _axis_kind(params, phi):
    return classify_at(params, phi, 1.0)


def initial_curvature(params: WeingartenParams, phi: Phi,
                      branch: Branch = Branch.PLUS) -> float:
    """``u''(0)``: a root of ``2a*x + b*x^2 = phi(1)``."""
    a, b = params.a, params.b
    if a == 0.0 and b == 0.0:
        raise DegenerateParams("a and b cannot both vanish")
    s = Branch.coerce(branch).sign
    phi1 = float(phi(1.0))
    if b == 0.0:
        return phi1 / (2.0 * a)
    cls = _axis_kind(params, phi)
    if cls.kind is Kind.HYPERBOLIC:
        raise NoSolution(
            f"hyperbolic at the axis: a^2 + b*phi(1) = {cls.discriminant:.6g} < 0; "
            "2a x + b x^2 = phi(1) has no real root")
    root = math.sqrt(max(cls.discriminant, 0.0))
    return (-a + s * root) / b


def _regular_sign(params, branch) -> int:
    # +1 picks the root 2I/(r + sqrt(...)) that stays finite as b -> 0;
    # which branch label that is depends on the sign of a.
    s = Branch.coerce(branch).sign
    return s if params.a > 0 else -s


def _solve_T(params, phi, branch, r, du):
    """Integral ``I``, radicand, ``X = f(u')`` and the new slope."""
    a, b = params.a, params.b
    if a == 0.0:
        raise DegenerateParams("the integrated operator needs a != 0")
    nu = 1.0 / np.sqrt(1.0 + du * du)
    g = phi(nu) / a
    integral = cumulative_trapezoid(r * g, r, initial=0.0)
    radicand = r * r + (2.0 * b / a) * integral
    bad = np.flatnonzero(radicand < 0)
    if bad.size:
        r_star = float(r[bad[0]])
        raise RadicandNegative(
            f"r^2 + (2b/a) I(r) < 0 at r = {r_star:.6g}: the iterate left the elliptic region",
            r_star=r_star)
    root = np.sqrt(radicand)
    X = np.zeros_like(r)
    pos = r > 0
    if b == 0.0 or _regular_sign(params, branch) > 0:
        X[pos] = 2.0 * integral[pos] / (r[pos] + root[pos])
    else:
        X[pos] = -(a / b) * (r[pos] + root[pos])
    big = np.flatnonzero(np.abs(X) >= 1.0)
    if big.size:
        raise SlopeBlowup(f"profile turns vertical at r = {r[big[0]]:.6g}; shrink R")
    return integral, radicand, X, X / np.sqrt(1.0 - X * X)


def apply_T(params: WeingartenParams, phi: Phi, branch: Branch,
            r_grid, du_grid) -> np.ndarray:
    """One application of the integrated operator to a slope grid."""
    r = np.asarray(r_grid, dtype=float)
    du = np.asarray(du_grid, dtype=float)
    if r.shape != du.shape or r.ndim != 1 or r[0] != 0.0:
        raise BadInput("r_grid must start at 0 and match du_grid")
    return _solve_T(params, phi, branch, r, du)[3]


def fixed_point_solve(params: WeingartenParams, phi: Phi,
                      branch: Branch = Branch.PLUS,
                      config: SolverConfig = SolverConfig()) -> RadialSolution:
    """Picard iteration from ``u' = 0`` on a uniform grid over ``[0, R]``.

    Stops once the sup-norm change of ``u`` plus that of ``u'`` is at most
    ``config.tol``.  Raises :class:`NonConvergence` after ``max_iter``
    iterations; a smaller ``R`` is then the remedy.
    """
    branch = Branch.coerce(branch)
    if params.a == 0.0:
        raise DegenerateParams("fixed-point solve needs a != 0")
    cls = _axis_kind(params, phi)
    if cls.kind is Kind.HYPERBOLIC:
        raise NoSolution(f"hyperbolic at the axis (a^2 + b*phi(1) = {cls.discriminant:.6g})")
    if cls.kind is Kind.PARABOLIC:
        raise DegenerateParabolic("parabolic at the axis; use the closed-form circle family",
                                  r_star=0.0)
    r = np.linspace(0.0, config.R, config.n + 1)
    du = np.zeros_like(r)
    u = np.zeros_like(r)
    inc = math.inf
    for k in range(1, config.max_iter + 1):
        du_new = _solve_T(params, phi, branch, r, du)[3]
        u_new = cumulative_trapezoid(du_new, r, initial=0.0)
        inc = float(np.max(np.abs(u_new - u)) + np.max(np.abs(du_new - du)))
        u, du = u_new, du_new
        if not math.isfinite(inc):
            break
        if np.max(np.abs(du)) > config.slope_cap:
            raise SlopeBlowup(f"|u'| exceeded slope_cap={config.slope_cap:g}; shrink R")
        if inc <= config.tol:
            return RadialSolution(r, u, du, params, phi, branch,
                                  Provenance.FIXED_POINT, iterations=k)
    raise NonConvergence(
        f"no convergence after {k} iterations on R={config.R:g} (last increment {inc:.3g}); "
        "shrink R", iterations=k, increment=inc)


def solve_shrinking(params, phi, branch=Branch.PLUS, config=SolverConfig(),
                    max_halvings: int = 8) -> RadialSolution:
    """``fixed_point_solve``, halving ``R`` on failure up to ``max_halvings`` times."""
    cfg = config
    for attempt in range(max_halvings + 1):
        try:
            return fixed_point_solve(params, phi, branch, cfg)
        except (NonConvergence, SlopeBlowup, RadicandNegative):
            if attempt == max_halvings:
                raise
            cfg = replace(cfg, R=cfg.R / 2)


# -- derivatives and residuals -----------------------------------------------

def second_derivative(sol: RadialSolution) -> np.ndarray:
    """``u''`` per node.

    Closed-form profiles use their stored values.  Otherwise ``u'`` is
    differenced (second order on non-uniform grids); at ``r = 0`` the odd
    extension of ``u'`` gives ``u'(r1)/r1``.  Only ``u'`` enters, so a
    vertical shift of ``u`` leaves the result bit-for-bit unchanged.
    """
    if sol.ddu is not None:
        return sol.ddu
    if len(sol) < 3:
        raise TooFewNodes("need at least 3 nodes")
    ddu = np.gradient(sol.du, sol.r, edge_order=2)
    if sol.r[0] == 0.0:
        ddu[0] = sol.du[1] / sol.r[1]
    return ddu


def ode_terms(params, phi, r, du, ddu):
    """Signed ``LHS - RHS`` of the radial equation per node."""
    a, b = params.a, params.b
    q = 1.0 + du * du
    sq = np.sqrt(q)
    out = np.empty_like(r)
    axis = r == 0.0
    off = ~axis
    k1 = ddu[off] / (q[off] * sq[off])
    k2 = du[off] / (r[off] * sq[off])
    out[off] = a * (k1 + k2) + b * k1 * k2 - phi(1.0 / sq[off])
    x = ddu[axis]
    out[axis] = 2.0 * a * x + b * x * x - phi(1.0)
    return out


def ode_residual(params: WeingartenParams, phi: Phi, sol: RadialSolution) -> ResidualReport:
    if len(sol) < 3:
        raise TooFewNodes("ode_residual needs at least 3 nodes")
    return ResidualReport.from_values(
        ode_terms(params, phi, sol.r, sol.du, second_derivative(sol)))


# -- explicit continuation ---------------------------------------------------

def _factor(a, b, r, p):
    # coefficient of u'' times (1+p^2)^(3/2): a + b*k2
    return a + b * p / (r * math.sqrt(1.0 + p * p))


def _numerator(a, phi, r, p):
    sq = math.sqrt(1.0 + p * p)
    return float(phi(1.0 / sq)) - a * p / (r * sq)


def _rk4(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def continue_ode(sol: RadialSolution, r_max: float, step: float = 1e-3,
                 slope_cap: float = 1e3, tau_den: float = TAU_DEN) -> RadialSolution:
    """Extend ``sol`` outward with classical RK4 on ``(u, u')``.

    Uses ``u'' = [phi(nu) - a*k2] * (1+p^2)^(3/2) / (a + b*k2)``.  Near a
    point where ``a + b*k2`` vanishes the slope turns stiff, so the march
    switches to ``p`` as the independent variable (``dr/dp`` is regular
    there) and the zero of the factor is pinned by bisection.

    Stops at ``r_max`` or when ``|u'|`` would exceed ``slope_cap``; the
    latter returns the truncated profile with ``stop_reason="vertical"``.
    Raises :class:`DegenerateParabolic` carrying ``r_star`` and the partial
    profile when the factor reaches ``tau_den * |a|``.
    """
    params, phi = sol.params, sol.phi
    a, b = params.a, params.b
    r0 = float(sol.r[-1])
    if r0 <= 0.0:
        raise BadInput("continuation starts from a node with r > 0")
    if not r_max > r0:
        raise BadInput(f"r_max={r_max} must exceed the last radius {r0}")
    if not step > 0:
        raise BadInput("step must be positive")
    tau = tau_den * (abs(a) if a != 0.0 else abs(b))

    rs, us, ps = [r0], [float(sol.u[-1])], [float(sol.du[-1])]

    def partial():
        return _assemble(sol, rs, us, ps, None)

    e_ref = abs(_factor(a, b, r0, ps[0]))
    if e_ref < tau:
        raise DegenerateParabolic(f"u'' coefficient vanishes at r = {r0:.9g}",
                                  r_star=r0, partial=partial())
    e_switch = 0.25 * e_ref

    def f_r(r, y):
        p = y[1]
        q = 1.0 + p * p
        return np.array([p, _numerator(a, phi, r, p) * q * math.sqrt(q) / _factor(a, b, r, p)])

    def f_p(p, y):
        r = y[0]
        q = 1.0 + p * p
        drdp = _factor(a, b, r, p) / (_numerator(a, phi, r, p) * q * math.sqrt(q))
        return np.array([drdp, p * drdp])

    h_min = step * 2.0 ** -40
    mode = "r"
    p_mode = True
    stop = "r_max"
    guard = 0
    while rs[-1] < r_max:
        guard += 1
        if guard > 50_000_000:
            raise RuntimeError("continuation did not terminate")
        r, u, p = rs[-1], us[-1], ps[-1]
        e_now = _factor(a, b, r, p)
        if mode == "r":
            h = min(step, r_max - r)
            y, trouble = None, None
            while h >= h_min:
                y, trouble = _checked_r_step(f_r, a, b, r, np.array([u, p]), h, e_now,
                                             max(e_switch, tau), slope_cap)
                if trouble is None:
                    break
                if trouble == "factor" and p_mode and _numerator(a, phi, r, p) != 0.0:
                    mode = "p"
                    break
                h /= 2
            if mode == "p":
                continue
            if trouble == "factor":
                raise DegenerateParabolic(f"u'' coefficient a + b*k2 vanishes at r = {r:.9g}",
                                          r_star=r, partial=partial())
            if trouble is not None:
                stop = "vertical"
                break
            rs.append(r + h)
            us.append(float(y[0]))
            ps.append(float(y[1]))
            continue

        # slope-parametrised march near a fold
        nmr = _numerator(a, phi, r, p)
        q = 1.0 + p * p
        dpdr = nmr * q * math.sqrt(q) / e_now
        dp = math.copysign(min(abs(dpdr) * step, 0.005 * (1.0 + abs(p))), dpdr)
        y = _rk4(f_p, p, np.array([r, u]), dp)
        p_new = p + dp
        if not np.all(np.isfinite(y)) or y[0] <= r:
            # r stopped increasing without a sign change of the factor
            mode, p_mode, e_switch = "r", False, 0.0
            continue
        e_new = _factor(a, b, y[0], p_new)
        if abs(e_new) < tau or math.copysign(1.0, e_new) != math.copysign(1.0, e_now):
            r_star = _bisect_fold(f_p, a, b, p, np.array([r, u]), dp, e_now, tau)
            raise DegenerateParabolic(
                f"u'' coefficient a + b*k2 vanishes at r = {r_star:.9g}",
                r_star=r_star, partial=partial())
        if abs(p_new) > slope_cap:
            stop = "vertical"
            break
        if y[0] >= r_max:
            theta = _bisect_radius(f_p, p, np.array([r, u]), dp, r_max)
            y = _rk4(f_p, p, np.array([r, u]), theta * dp)
            rs.append(r_max)
            us.append(float(y[1]))
            ps.append(p + theta * dp)
            break
        rs.append(float(y[0]))
        us.append(float(y[1]))
        ps.append(p_new)
        if abs(e_new) > 2 * e_switch:
            mode = "r"
    return _assemble(sol, rs, us, ps, stop)


def _checked_r_step(f_r, a, b, r, y, h, e_now, e_switch, slope_cap):
    """One RK4 step in r; returns (state, None) or (None, reason)."""
    sign = math.copysign(1.0, e_now)
    stages = []

    def f(t, z):
        p = z[1]
        e = _factor(a, b, t, p) if t > 0 else math.nan
        stages.append(e)
        if not math.isfinite(p) or not math.isfinite(e) or abs(p) > slope_cap:
            raise _StageFailure("slope")
        if math.copysign(1.0, e) != sign or abs(e) < e_switch:
            raise _StageFailure("factor")
        return f_r(t, z)

    try:
        out = _rk4(f, r, y, h)
        f(r + h, out)
    except _StageFailure as exc:
        return None, exc.reason
    except (ValueError, ZeroDivisionError, OverflowError):
        return None, "slope"
    if not np.all(np.isfinite(out)):
        return None, "slope"
    return out, None


class _StageFailure(Exception):
    def __init__(self, reason):
        self.reason = reason


def _bisect_fold(f_p, a, b, p, y, dp, e_now, tau, iters=80):
    lo, hi = 0.0, 1.0
    sign = math.copysign(1.0, e_now)
    r_lo = float(y[0])
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        z = _rk4(f_p, p, y, mid * dp)
        e = _factor(a, b, z[0], p + mid * dp)
        if math.copysign(1.0, e) == sign and abs(e) >= tau:
            lo, r_lo = mid, float(z[0])
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return r_lo


def _bisect_radius(f_p, p, y, dp, target, iters=80):
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if _rk4(f_p, p, y, mid * dp)[0] < target:
            lo = mid
        else:
            hi = mid
    return hi


def _assemble(sol, rs, us, ps, stop):
    r = np.concatenate([sol.r, rs[1:]])
    u = np.concatenate([sol.u, us[1:]])
    du = np.concatenate([sol.du, ps[1:]])
    return RadialSolution(r, u, du, sol.params, sol.phi, sol.branch,
                          Provenance.CONTINUED, iterations=sol.iterations, stop_reason=stop,
                          offset=sol.offset)


# -- contraction probe -------------------------------------------------------

class LCG64:
    """64-bit linear congruential generator (Knuth's MMIX constants).

    ``state <- 6364136223846793005 * state + 1442695040888963407 (mod 2**64)``;
    uniforms take the top 53 bits.  Chosen so that probe draws are
    reproducible bit-for-bit in any language.
    """

    MULT = 6364136223846793005
    INC = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int = 0):
        self.state = int(seed) & self.MASK

    def next_u64(self) -> int:
        self.state = (self.MULT * self.state + self.INC) & self.MASK
        return self.state

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * ((self.next_u64() >> 11) * (1.0 / (1 << 53)))

    def uniforms(self, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        return np.array([self.uniform(lo, hi) for _ in range(n)])


def _c1_norm(u, du):
    return float(np.max(np.abs(u)) + np.max(np.abs(du)))


def _random_slopes(rng, r, eps):
    h = np.diff(r)
    du = np.concatenate([[0.0], np.cumsum(rng.uniforms(h.size, -1.0, 1.0) * h)])
    u = cumulative_trapezoid(du, r, initial=0.0)
    scale = eps * rng.uniform(0.2, 1.0) / max(_c1_norm(u, du), 1e-300)
    return u * scale, du * scale


def estimate_contraction(params: WeingartenParams, phi: Phi, branch: Branch = Branch.PLUS,
                         R: float = 0.05, n: int = 256, trials: int = 32, seed: int = 0,
                         eps: float = 0.1) -> float:
    """Largest observed ``||Tu - Tv|| / ||u - v||`` over random pairs.

    The norm is ``sup|u| + sup|u'|``; pairs are drawn in the ball of radius
    ``eps`` from random walks in ``u'`` (so ``u'`` is Lipschitz with
    constant at most one before scaling).
    """
    if int(trials) < 2:
        raise BadInput("trials must be >= 2")
    initial_curvature(params, phi, branch)
    cls = _axis_kind(params, phi)
    if cls.kind is not Kind.ELLIPTIC:
        raise DegenerateParabolic("contraction probe needs an elliptic axis", r_star=0.0)
    rng = LCG64(seed)
    r = np.linspace(0.0, R, int(n) + 1)
    worst = 0.0
    for _ in range(int(trials)):
        u, du = _random_slopes(rng, r, eps)
        v, dv = _random_slopes(rng, r, eps)
        Tdu = apply_T(params, phi, branch, r, du)
        Tdv = apply_T(params, phi, branch, r, dv)
        Tu = cumulative_trapezoid(Tdu, r, initial=0.0)
        Tv = cumulative_trapezoid(Tdv, r, initial=0.0)
        denom = _c1_norm(u - v, du - dv)
        if denom > 0:
            worst = max(worst, _c1_norm(Tu - Tv, Tdu - Tdv) / denom)
    return worst
