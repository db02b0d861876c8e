"""Radial equation of the separated eigenproblem on a geodesic disk.

For angular index m the radial part g solves

    -(1/sn) (sn g')' + (m^2/sn^2) g = lambda g     on (0, theta_end),

with sn = sn_K.  integrate_radial shoots the solution that is regular at
the origin (the theta^m Frobenius branch).  legendre_radial evaluates the
closed-form associated-Legendre radial modes of real degree, which serve
as an independent check on the shooting path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .geometry import SPHERE, SpaceForm

# Integration tolerances chosen so endpoint data supports 1e-8-level
# eigenvalue bisections.
ODE_RTOL = 1e-11
ODE_ATOL = 1e-11

# Series launch offset: theta = 0 is a regular singular point.
LAUNCH_THETA = 1e-6

# The spherical hypergeometric series degrades as theta -> pi; past this
# cutoff legendre_radial continues the series value with the ODE.
SPHERICAL_SERIES_MAX = 2.8

SERIES_MAX_TERMS = 100_000
SERIES_RTOL = 1e-16


class IntegrationError(RuntimeError):
    """Adaptive integration failed (step underflow or overflow)."""

    def __init__(self, message: str, theta_reached: float):
        super().__init__(f"{message} (theta reached {theta_reached:.6g})")
        self.theta_reached = theta_reached


class SeriesError(RuntimeError):
    """Hypergeometric series failed to converge."""


@dataclass(frozen=True)
class RadialProblem:
    form: SpaceForm
    m: int
    lam: float
    theta_end: float

    def __post_init__(self):
        if self.m not in (0, 1, 2):
            raise ValueError(f"angular index must be 0, 1 or 2, got {self.m}")
        self.form.check_theta(self.theta_end)

    def frobenius_c2(self) -> float:
        """Quadratic coefficient of the regular branch g = theta^m (1 + c2 theta^2)."""
        m, K = self.m, self.form.K
        return (K * m * (m + 1) / 3.0 - self.lam) / (4.0 * (m + 1))


@dataclass
class RadialSolution:
    """Regular radial solution sampled on the integrator's adaptive grid.

    Normalization: g(theta)/theta^m -> 1 as theta -> 0 (so g(0) = 1 for
    m = 0 and g'(0) = 0).
    """

    problem: RadialProblem
    thetas: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    zeros: np.ndarray
    _dense: object = field(repr=False)

    @property
    def theta_end(self) -> float:
        return self.problem.theta_end

    def eval(self, theta):
        """Value and derivative at theta (scalar or array), series below launch."""
        theta = np.asarray(theta, dtype=float)
        scalar = theta.ndim == 0
        th = np.atleast_1d(theta)
        out_g = np.empty_like(th)
        out_dg = np.empty_like(th)
        small = th < LAUNCH_THETA
        if small.any():
            c2 = self.problem.frobenius_c2()
            m = self.problem.m
            ts = th[small]
            out_g[small] = ts**m * (1.0 + c2 * ts * ts)
            if m == 0:
                out_dg[small] = 2.0 * c2 * ts
            else:
                out_dg[small] = ts ** (m - 1) * (m + (m + 2) * c2 * ts * ts)
        if (~small).any():
            vals = self._dense(th[~small])
            out_g[~small] = vals[0]
            out_dg[~small] = vals[1]
        if scalar:
            return float(out_g[0]), float(out_dg[0])
        return out_g, out_dg

    def endpoint(self):
        return float(self.g[-1]), float(self.dg[-1])


def _rhs(form: SpaceForm, m: int, lam: float):
    m2 = float(m * m)
    K = form.K
    if K == 1:
        def rhs(t, y):
            s = math.sin(t)
            return (y[1], -(math.cos(t) / s) * y[1] + (m2 / (s * s) - lam) * y[0])
    elif K == 0:
        def rhs(t, y):
            return (y[1], -y[1] / t + (m2 / (t * t) - lam) * y[0])
    else:
        def rhs(t, y):
            s = math.sinh(t)
            return (y[1], -(math.cosh(t) / s) * y[1] + (m2 / (s * s) - lam) * y[0])
    return rhs


def _launch_state(problem: RadialProblem, theta0: float):
    m = problem.m
    c2 = problem.frobenius_c2()
    if m == 0:
        return (1.0 + c2 * theta0 * theta0, 2.0 * c2 * theta0)
    g = theta0**m * (1.0 + c2 * theta0 * theta0)
    dg = theta0 ** (m - 1) * (m + (m + 2) * c2 * theta0 * theta0)
    return (g, dg)


def integrate_radial(problem: RadialProblem) -> RadialSolution:
    """Shoot the regular solution from the origin out to theta_end."""
    theta0 = LAUNCH_THETA
    if problem.theta_end <= theta0 * 10:
        raise ValueError(f"theta_end too small: {problem.theta_end}")
    y0 = _launch_state(problem, theta0)

    def crossing(t, y):
        return y[0]

    crossing.direction = 0
    sol = solve_ivp(
        _rhs(problem.form, problem.m, problem.lam),
        (theta0, problem.theta_end),
        y0,
        method="DOP853",
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        dense_output=True,
        events=crossing,
    )
    if not sol.success:
        raise IntegrationError(sol.message, float(sol.t[-1]))
    if not (np.isfinite(sol.y).all() and np.isfinite(sol.t).all()):
        raise IntegrationError("solution overflowed", float(sol.t[-1]))
    return RadialSolution(
        problem=problem,
        thetas=sol.t,
        g=sol.y[0],
        dg=sol.y[1],
        zeros=sol.t_events[0],
        _dense=sol.sol,
    )


def log_derivative_at(solution: RadialSolution, theta: float) -> float:
    """g'(theta)/g(theta) from the solution's dense output."""
    g, dg = solution.eval(theta)
    if abs(g) <= 1e-13 * math.hypot(g, dg):
        raise ZeroDivisionError(f"g vanishes at theta = {theta:.12g}")
    return dg / g


# ---------------------------------------------------------------------------
# Associated Legendre radial modes of real degree (orders 0 and 1)
# ---------------------------------------------------------------------------


def _gauss_series(a: float, b: float, c: float, z: np.ndarray):
    """Partial sums of 2F1(a,b;c;z) and its z-derivative, term recurrence."""
    z = np.asarray(z, dtype=float)
    zsafe = np.where(z == 0.0, 1.0, z)
    s = np.ones_like(z)
    ds = np.zeros_like(z)
    term = np.ones_like(z)
    scale = np.ones_like(z)
    for k in range(SERIES_MAX_TERMS):
        factor = (a + k) * (b + k) / ((c + k) * (k + 1.0))
        term = term * factor * z
        s += term
        ds += (k + 1.0) * term / zsafe
        np.maximum(scale, np.abs(s), out=scale)
        if np.all(np.abs(term) <= SERIES_RTOL * scale):
            return s, ds
    raise SeriesError(f"2F1({a},{b};{c}) did not converge in {SERIES_MAX_TERMS} terms")


def _legendre_sphere_series(n: float, m: int, theta: np.ndarray):
    """P_n^{-m}(cos theta) and theta-derivative via the tan(theta/2) series."""
    theta = np.asarray(theta, dtype=float)
    half = theta / 2.0
    z = np.sin(half) ** 2
    s, ds = _gauss_series(n + 1.0, -n, 1.0 + m, z)
    dz = np.sin(half) * np.cos(half)
    fact = math.factorial(m)
    if m == 0:
        return s / fact, ds * dz / fact
    tn = np.tan(half)
    pref = tn**m / fact
    dpref = (m / 2.0) * tn ** (m - 1) / np.cos(half) ** 2 / fact
    return pref * s, dpref * s + pref * ds * dz


def _legendre_hyper_series(n: float, m: int, theta: np.ndarray):
    """Real branch of P_n^{-m}(cosh theta) via the tanh^2(theta/2) series."""
    theta = np.asarray(theta, dtype=float)
    half = theta / 2.0
    tanh = np.tanh(half)
    w = tanh**2
    s, ds = _gauss_series(n + 1.0, n + m + 1.0, 1.0 + m, w)
    sech2 = 1.0 / np.cosh(half) ** 2
    dw = tanh * sech2
    fact = math.factorial(m)
    cosh_pow = np.cosh(half) ** (-2.0 * (n + 1.0))
    dcosh_pow = -(n + 1.0) * cosh_pow * tanh
    if m == 0:
        pref = np.ones_like(theta) / fact
        dpref = np.zeros_like(theta)
    else:
        pref = tanh**m / fact
        dpref = (m / 2.0) * tanh ** (m - 1) * sech2 / fact
    val = pref * cosh_pow * s
    dval = dpref * cosh_pow * s + pref * dcosh_pow * s + pref * cosh_pow * ds * dw
    return val, dval


def _continue_by_ode(n: float, m: int, thetas: np.ndarray):
    """Spherical values past the series cutoff by integrating the ODE."""
    lam = n * (n + 1.0)
    t0 = SPHERICAL_SERIES_MAX
    g0, dg0 = _legendre_sphere_series(n, m, np.array([t0]))
    t_max = float(np.max(thetas))
    sol = solve_ivp(
        _rhs(SPHERE, m, lam),
        (t0, t_max),
        (float(g0[0]), float(dg0[0])),
        method="DOP853",
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        dense_output=True,
    )
    if not sol.success:
        raise IntegrationError(sol.message, float(sol.t[-1]))
    vals = sol.sol(thetas)
    return vals[0], vals[1]


def legendre_radial_many(n: float, m: int, form: SpaceForm, thetas):
    """Vectorized (value, derivative) of the Legendre radial mode.

    Spherical: P_n^{-m}(cos theta), eigenvalue n(n+1).  Hyperbolic: real
    positive branch of the Legendre function of cosh theta, eigenvalue
    -n(n+1).  Leading behavior is (theta/2)^m / m! at the origin.
    """
    if m not in (0, 1):
        raise ValueError(f"legendre order must be 0 or 1, got {m}")
    if n < -0.5:
        raise ValueError(f"degree must be >= -1/2, got {n}")
    if form.K == 0:
        raise ValueError("Legendre modes exist only for K = +1 or -1")
    thetas = np.asarray(thetas, dtype=float)
    scalar = thetas.ndim == 0
    th = np.atleast_1d(thetas).astype(float)
    if form.K == -1:
        g, dg = _legendre_hyper_series(n, m, th)
    else:
        if np.any(th >= math.pi):
            raise ValueError("spherical theta must be < pi")
        g = np.empty_like(th)
        dg = np.empty_like(th)
        near = th <= SPHERICAL_SERIES_MAX
        if near.any():
            g[near], dg[near] = _legendre_sphere_series(n, m, th[near])
        if (~near).any():
            g[~near], dg[~near] = _continue_by_ode(n, m, th[~near])
    if scalar:
        return float(g[0]), float(dg[0])
    return g, dg


def legendre_radial(n: float, m: int, form: SpaceForm, theta: float):
    """Scalar wrapper around legendre_radial_many."""
    return legendre_radial_many(n, m, form, theta)


def legendre_leading_coefficient(m: int) -> float:
    """Coefficient of theta^m in the Legendre mode at the origin."""
    return 1.0 / (2.0**m * math.factorial(m))


# ---------------------------------------------------------------------------
# Shape classification of the radial profile
# ---------------------------------------------------------------------------

PROFILE_SAMPLES = 2001
SIGN_TOL_FACTOR = 1e-10
BISECT_XTOL = 1e-8


@dataclass(frozen=True)
class ShapeProfile:
    """Sign pattern of g' on (0, theta_end).

    kind is one of 'Up', 'UpDown', 'UpDownUp', 'Other'.  theta_max is the
    first sign change of g' (None if monotone), theta_min the second (for
    'UpDown' it equals theta_end, marking the empty final interval).
    """

    kind: str
    theta_max: float | None
    theta_min: float | None
    diagnostics: str = ""


def _refine_crossing(solution: RadialSolution, lo: float, hi: float) -> float:
    f = lambda t: solution.eval(t)[1]
    return brentq(f, lo, hi, xtol=BISECT_XTOL)


def shape_profile(solution: RadialSolution) -> ShapeProfile:
    """Classify g' as Up / UpDown / UpDownUp on the solution interval."""
    a = max(LAUNCH_THETA * 10, solution.theta_end * 1e-6)
    ts = np.linspace(a, solution.theta_end, PROFILE_SAMPLES)
    g, dg = solution.eval(ts)
    tol_g = SIGN_TOL_FACTOR * float(np.max(np.abs(g)))
    if float(np.min(g)) < -tol_g:
        return ShapeProfile("Other", None, None, "g changes sign on (0, theta_end]")
    tol = SIGN_TOL_FACTOR * float(np.max(np.abs(dg)))
    signs = np.zeros(len(ts), dtype=int)
    signs[dg > tol] = 1
    signs[dg < -tol] = -1
    nz = signs[signs != 0]
    if len(nz) == 0:
        return ShapeProfile("Other", None, None, "g' below tolerance everywhere")
    runs = [int(nz[0])]
    for s in nz[1:]:
        if s != runs[-1]:
            runs.append(int(s))
    if runs[0] != 1:
        return ShapeProfile("Other", None, None, "g' negative near the origin")
    if runs == [1]:
        return ShapeProfile("Up", None, None)
    if len(runs) > 3:
        return ShapeProfile("Other", None, None, f"g' sign runs {runs}")

    # locate the bracketing sample pairs for each sign change
    changes = []
    prev_sign = 1
    prev_idx = int(np.argmax(signs == 1))
    for i in range(prev_idx + 1, len(ts)):
        s = signs[i]
        if s != 0 and s != prev_sign:
            changes.append((ts[prev_idx], ts[i]))
            prev_sign = s
        if s != 0:
            prev_idx = i
    theta_max = _refine_crossing(solution, *changes[0])
    if runs == [1, -1]:
        return ShapeProfile("UpDown", theta_max, solution.theta_end)
    theta_min = _refine_crossing(solution, *changes[1])
    return ShapeProfile("UpDownUp", theta_max, theta_min)
