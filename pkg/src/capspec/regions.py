"""Parameter regions of the (t, beta) plane.

Constructs the special degrees n2 and n4 with their apertures and
abscissas, the beta curves traced by Legendre radial modes, the
front-loaded upper boundary, membership in the five closed-form
monotone-case sets, and full classification of a parameter point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq, minimize_scalar

from .eigen import DirichletCrossing, second_eigen_with_mode
from .geometry import (
    EUCLIDEAN,
    FOUR_PI,
    HYPERBOLIC,
    SPHERE,
    SpaceForm,
    form_for_t,
    theta_from_t,
)
from .radial import (
    RadialProblem,
    RadialSolution,
    integrate_radial,
    legendre_radial_many,
    shape_profile,
)

TWO_PI = 2.0 * math.pi

# Sign tolerances: g' signs at 1e-10 * max|g'| (handled in shape_profile);
# nonnegativity of the front-loaded integral decided at -1e-9 absolute.
FL_SIGN_TOL = 1e-9

THETA_SCAN_POINTS = 4000
N_BISECT_TOL = 1e-6
QUAD_REL_TOL = 1e-10

BS_LABELS = ("BS-I", "BS-II", "BS-III", "BS-IV", "BS-V")


# ---------------------------------------------------------------------------
# quadrature helpers
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = leggauss(64)


def _gl_panels(f, a: float, b: float, rel_tol: float = QUAD_REL_TOL) -> float:
    """Panel-doubling 64-point Gauss-Legendre quadrature of f on [a, b]."""
    prev = None
    panels = 1
    for _ in range(12):
        edges = np.linspace(a, b, panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1] - edges[0])
        nodes = (mid[:, None] + half * _GL_NODES[None, :]).ravel()
        vals = f(nodes)
        total = half * float(np.sum(vals.reshape(panels, -1) @ _GL_WEIGHTS))
        if prev is not None and abs(total - prev) <= rel_tol * max(abs(total), 1e-30):
            return total
        prev = total
        panels *= 2
    return prev


def _fl_parts_integral(g_of_theta, form: SpaceForm, theta_min: float) -> float:
    """Front-loaded integral in its integrated-by-parts form.

    (1/4) * int_0^theta_min (g(theta_min)^2 - g(theta)^2) sn(theta) dtheta,
    which avoids differentiating g.
    """
    g_end = float(g_of_theta(np.array([theta_min]))[0])

    def integrand(ts):
        g = g_of_theta(ts)
        if form.K == 1:
            s = np.sin(ts)
        elif form.K == 0:
            s = ts
        else:
            s = np.sinh(ts)
        return (g_end * g_end - g * g) * s

    return 0.25 * _gl_panels(integrand, 0.0, theta_min)


def front_loaded_integral(solution: RadialSolution, theta_min: float) -> float:
    """Front-loaded integral of a shooting solution up to theta_min."""
    if not 0.0 < theta_min <= solution.theta_end + 1e-12:
        raise ValueError(f"theta_min {theta_min} outside solution range")
    ts_check = np.linspace(theta_min * 1e-3, theta_min, 200)
    g_check, _ = solution.eval(ts_check)
    if float(np.min(g_check)) < -1e-10 * float(np.max(np.abs(g_check))):
        raise ValueError("g is not positive on (0, theta_min]")

    def g_of_theta(ts):
        return solution.eval(ts)[0]

    return _fl_parts_integral(g_of_theta, solution.problem.form, theta_min)


def front_loaded_integral_legendre(n: float, theta_min: float) -> float:
    """Front-loaded integral for the spherical Legendre mode of degree n."""

    def g_of_theta(ts):
        return legendre_radial_many(n, 1, SPHERE, ts)[0]

    return _fl_parts_integral(g_of_theta, SPHERE, theta_min)


# ---------------------------------------------------------------------------
# special constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpecialConstants:
    n2: float
    theta2: float
    t2: float
    n4: float
    theta4: float
    t4: float


def _legendre_gprime_min(n: float, theta_hi: float):
    """Minimum of g' for g = P_n^{-1}(cos theta) over (0, theta_hi)."""
    ts = np.linspace(theta_hi / THETA_SCAN_POINTS, theta_hi, THETA_SCAN_POINTS)
    _, dg = legendre_radial_many(n, 1, SPHERE, ts)
    i = int(np.argmin(dg))
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, len(ts) - 1)]
    res = minimize_scalar(
        lambda t: legendre_radial_many(n, 1, SPHERE, float(t))[1],
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-10},
    )
    if res.fun < dg[i]:
        return float(res.fun), float(res.x)
    return float(dg[i]), float(ts[i])


def legendre_gprime_zeros(n: float, theta_hi: float) -> list[float]:
    """Zeros of d/dtheta P_n^{-1}(cos theta) on (0, theta_hi), by scan."""
    ts = np.linspace(theta_hi / THETA_SCAN_POINTS, theta_hi, THETA_SCAN_POINTS)
    _, dg = legendre_radial_many(n, 1, SPHERE, ts)
    zeros = []
    for i in range(len(ts) - 1):
        if dg[i] == 0.0:
            zeros.append(float(ts[i]))
        elif dg[i] * dg[i + 1] < 0.0:
            zeros.append(
                brentq(
                    lambda t: legendre_radial_many(n, 1, SPHERE, float(t))[1],
                    ts[i],
                    ts[i + 1],
                    xtol=1e-12,
                )
            )
    return zeros


def neumann_aperture(n: float, theta_hi: float | None = None) -> float:
    """Second zero of g' for g = P_n^{-1}: the aperture with Neumann data
    approached from a decreasing stretch of g."""
    if theta_hi is None:
        theta_hi = SPHERE.max_theta()
    zeros = legendre_gprime_zeros(n, theta_hi)
    if len(zeros) < 2:
        raise ValueError(f"degree {n} has no second derivative zero below {theta_hi:.6f}")
    return zeros[1]


def solve_special_constants(n_tol: float = N_BISECT_TOL) -> SpecialConstants:
    """Bisection for n2 (first tangency of g') and n4 (front-loaded boundary)."""
    theta_hi = SPHERE.max_theta()

    def gprime_dips(n: float) -> bool:
        return _legendre_gprime_min(n, theta_hi)[0] < 0.0

    lo, hi = 0.80, 0.90
    while gprime_dips(lo):
        lo -= 0.05
    while not gprime_dips(hi):
        hi += 0.05
    while hi - lo > n_tol:
        mid = 0.5 * (lo + hi)
        if gprime_dips(mid):
            hi = mid
        else:
            lo = mid
    n2 = 0.5 * (lo + hi)
    # tangency location: argmin of g' at the threshold degree
    theta2 = _legendre_gprime_min(n2, theta_hi)[1]
    t2 = FOUR_PI * math.sin(theta2 / 2.0) ** 2

    def fl_at_aperture(n: float) -> float:
        return front_loaded_integral_legendre(n, neumann_aperture(n))

    lo, hi = n2 + 2.0 * n_tol, 0.99
    flo = fl_at_aperture(lo)
    fhi = fl_at_aperture(hi)
    if flo < 0.0 or fhi >= 0.0:
        raise RuntimeError(
            f"front-loaded bisection bracket failed: I({lo})={flo:.3g}, I({hi})={fhi:.3g}"
        )
    while hi - lo > n_tol:
        mid = 0.5 * (lo + hi)
        if fl_at_aperture(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    n4 = 0.5 * (lo + hi)
    theta4 = neumann_aperture(n4)
    t4 = FOUR_PI * math.sin(theta4 / 2.0) ** 2
    return SpecialConstants(n2=n2, theta2=theta2, t2=t2, n4=n4, theta4=theta4, t4=t4)


# ---------------------------------------------------------------------------
# beta curves and the front-loaded boundary
# ---------------------------------------------------------------------------


def beta_curve(n: float, t) -> float | np.ndarray:
    """beta = (2 pi sin Theta) * (-g'/g)(Theta) for g = P_n^{-1}, t = t(Theta)."""
    ts = np.asarray(t, dtype=float)
    scalar = ts.ndim == 0
    tv = np.atleast_1d(ts)
    thetas = np.array([theta_from_t(SPHERE, float(x)) for x in tv])
    g, dg = legendre_radial_many(n, 1, SPHERE, thetas)
    if np.any(np.abs(g) <= 1e-13 * np.hypot(g, dg)):
        raise DirichletCrossing(f"P_{n}^-1 vanishes at an aperture in the t-grid")
    beta = -TWO_PI * np.sin(thetas) * dg / g
    if scalar:
        return float(beta[0])
    return beta


def largest_front_loaded_degree(theta: float, n_tol: float = 1e-8) -> float:
    """Largest n with nonnegative front-loaded integral up to theta_min = theta."""
    lo = 0.1
    if front_loaded_integral_legendre(lo, theta) < 0.0:
        raise RuntimeError(f"front-loaded integral negative even at n={lo}")
    hi = 1.0
    for _ in range(40):
        if front_loaded_integral_legendre(hi, theta) < 0.0:
            break
        lo = hi
        hi *= 2.0
    else:
        raise RuntimeError("no upper bracket for the front-loaded degree")
    while hi - lo > n_tol:
        mid = 0.5 * (lo + hi)
        if front_loaded_integral_legendre(mid, theta) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# region membership and classification
# ---------------------------------------------------------------------------


def v_curve(t: float) -> float:
    """The graph t (4 pi - t)/(2 pi - t) bounding set V from above-left."""
    return t * (FOUR_PI - t) / (TWO_PI - t)


@dataclass(frozen=True)
class RegionPoint:
    t: float
    beta: float
    label: str
    detail: str = ""


@dataclass
class ConditionReport:
    """Outcome of the direct solver checks at one parameter point."""

    mode: str
    boundary: bool
    profile_kind: str | None = None
    theta_max: float | None = None
    theta_min: float | None = None
    fl_integral: float | None = None
    lambda2: float | None = None
    dominance_ok: bool | None = None


class RegionClassifier:
    """Classification of (t, beta) points, sharing one SpecialConstants.

    Front-loaded anchor points (Prop-style drop-down references) are
    memoized per t value encountered; condition-(1) checks at anchors in
    the fourth quadrant are cached alongside.
    """

    def __init__(self, constants: SpecialConstants | None = None):
        self.constants = constants if constants is not None else solve_special_constants()
        self._anchors: dict[float, float | None] = {}
        self.t3 = FOUR_PI * math.sin(3.0 * math.pi / 8.0) ** 2
        self.t_max = FOUR_PI * math.sin(SPHERE.max_theta() / 2.0) ** 2

    # -- geometry of a parameter point ---------------------------------

    @staticmethod
    def point_geometry(t: float, beta: float):
        """(form, theta, alpha) for a parameter point; Euclidean uses theta=1."""
        form = form_for_t(t)
        theta = 1.0 if form.K == 0 else theta_from_t(form, t)
        alpha = beta / (TWO_PI * form.sn(theta))
        return form, theta, alpha

    def angular_guaranteed(self, t: float, beta: float) -> bool:
        """Whether the second mode is angular by the closed-form criterion
        (hyperbolic and Euclidean always; spherical outside the uncertain
        band alpha in (cot Theta, tan Theta) with Theta > 3 pi/4)."""
        if t <= 0.0:
            return True
        form, theta, alpha = self.point_geometry(t, beta)
        if theta <= 3.0 * math.pi / 4.0 + 1e-15:
            return True
        lo, hi = 1.0 / math.tan(theta), math.tan(theta)
        return not (lo < alpha < hi)

    # -- direct condition checks ----------------------------------------

    def check_conditions(self, t: float, beta: float, check_dominance: bool = True) -> ConditionReport:
        """Solver-based conditions: mode of the second eigenfunction and the
        shape/front-loaded data of the lowest angular profile."""
        form, theta, alpha = self.point_geometry(t, beta)
        mc = second_eigen_with_mode(form, theta, alpha, check_dominance=check_dominance)
        report = ConditionReport(
            mode=mc.mode,
            boundary=mc.boundary,
            lambda2=mc.lambda2,
            dominance_ok=mc.dominance_ok,
        )
        prof = shape_profile(mc.angular_result.solution)
        report.profile_kind = prof.kind
        report.theta_max = prof.theta_max
        report.theta_min = prof.theta_min
        if prof.kind in ("UpDown", "UpDownUp"):
            report.fl_integral = front_loaded_integral(
                mc.angular_result.solution, prof.theta_min
            )
        return report

    # -- front-loaded anchors -------------------------------------------

    def fl_upper_boundary(self, t: float) -> float:
        """Upper boundary of the first-quadrant front-loaded region."""
        if not 0.0 < t <= self.constants.t4:
            raise ValueError(f"t must lie in (0, t4], got {t}")
        theta = theta_from_t(SPHERE, t)
        n = largest_front_loaded_degree(theta)
        g, dg = legendre_radial_many(n, 1, SPHERE, theta)
        if abs(g) <= 1e-13 * math.hypot(g, dg):
            raise DirichletCrossing(f"boundary profile vanishes at t={t}")
        return -TWO_PI * math.sin(theta) * dg / g

    def _verify_anchor(self, t: float, beta: float) -> bool:
        """Condition checks at a candidate fourth-quadrant anchor point."""
        report = self.check_conditions(t, beta, check_dominance=False)
        if report.mode != "Angular" or report.boundary:
            return False
        if report.profile_kind == "Up":
            return beta <= 0.0
        if report.profile_kind in ("UpDown", "UpDownUp"):
            return report.fl_integral is not None and report.fl_integral >= -FL_SIGN_TOL
        return False

    def anchor_beta(self, t: float) -> float | None:
        """Verified front-loaded point above which drop-down applies at t.

        Returns None when no anchor is available (outside the treated
        range, or verification failed).
        """
        key = round(t, 10)
        if key in self._anchors:
            return self._anchors[key]
        c = self.constants
        beta: float | None
        if t == 0.0:
            beta = TWO_PI  # Euclidean front-loaded segment reaches 2 pi
        elif 0.0 < t <= c.t4:
            beta = self.fl_upper_boundary(t)
        elif c.t4 < t < self.t_max:
            # fourth-quadrant boundary traced by the n4 profile; needs the
            # angular condition verified at the anchor itself
            beta = float(beta_curve(c.n4, t))
            if beta > 0.0 or not self._verify_anchor(t, beta):
                beta = None
        else:
            beta = None
        self._anchors[key] = beta
        return beta

    # -- closed-form membership -----------------------------------------

    def bs_set_membership(self, t: float, beta: float, check_v: bool = True) -> set[str]:
        """Labels of the closed-form monotone-case sets containing (t, beta).

        Sets I-IV are pure inequalities; set V additionally requires the
        angular condition, checked through the solver when check_v is set.
        """
        c = self.constants
        labels: set[str] = set()
        if beta < -TWO_PI:
            return labels
        if t <= c.t2 and beta <= 0.0:
            labels.add("BS-I")
        if c.t2 < t <= self.t3 and beta <= beta_curve(c.n2, t):
            labels.add("BS-II")
        if self.t3 < t < FOUR_PI:
            b2 = beta_curve(c.n2, t)
            if beta <= TWO_PI - t:
                labels.add("BS-III")
            if v_curve(t) <= beta <= b2:
                labels.add("BS-IV")
            if check_v and TWO_PI - t <= beta <= min(v_curve(t), b2):
                report = self.check_conditions(t, beta, check_dominance=False)
                if report.mode == "Angular" and not report.boundary:
                    labels.add("BS-V")
        return labels

    # -- full classification ---------------------------------------------

    def classify_point(self, t: float, beta: float, verify: bool = True) -> RegionPoint:
        """Full label for one parameter point.

        verify=False replaces solver work by the closed-form guarantees
        wherever those apply (grid sweeps); verify=True runs the direct
        condition checks the labels rely on.
        """
        if t < 0.0 and beta > 0.0:
            return RegionPoint(t, beta, "NA", "second quadrant is untreated")
        if beta < -TWO_PI:
            return RegionPoint(t, beta, "Unknown", "below beta = -2 pi")
        if t >= self.t_max:
            return RegionPoint(t, beta, "Unknown", "aperture beyond spherical cap limit")

        labels = self.bs_set_membership(t, beta, check_v=False)
        if labels:
            label = next(l for l in BS_LABELS if l in labels)
            if verify:
                report = self.check_conditions(t, beta, check_dominance=False)
                ok = (
                    report.mode == "Angular"
                    and not report.boundary
                    and report.profile_kind == "Up"
                )
                if not ok:
                    return RegionPoint(
                        t, beta, "Unknown",
                        f"closed-form {label} failed direct checks: mode={report.mode}, "
                        f"profile={report.profile_kind}",
                    )
            return RegionPoint(t, beta, label)

        # mode of the second eigenfunction (solver only where not guaranteed)
        report = None
        if verify or not self.angular_guaranteed(t, beta):
            try:
                report = self.check_conditions(t, beta, check_dominance=verify)
            except Exception as exc:  # solver failures degrade the label
                return RegionPoint(t, beta, "Unknown", f"solver failure: {exc}")
            if report.mode == "Radial":
                return RegionPoint(t, beta, "E-radial", f"lambda2={report.lambda2:.9g}")
            if report.boundary:
                return RegionPoint(t, beta, "Unknown", "angular/radial tie")

        # set V (angular condition known to hold at this point)
        if self.t3 < t < FOUR_PI:
            b2 = beta_curve(self.constants.n2, t)
            if TWO_PI - t <= beta <= min(v_curve(t), b2):
                return RegionPoint(t, beta, "BS-V")

        # front-loaded: direct conditions, then drop-down
        if t >= 0.0:
            if report is not None and report.profile_kind in ("UpDown", "UpDownUp"):
                if report.fl_integral is not None and report.fl_integral >= -FL_SIGN_TOL:
                    return RegionPoint(t, beta, "FL", "direct front-loaded conditions")
            anchor = self.anchor_beta(t)
            if anchor is not None and beta <= anchor + 1e-12:
                return RegionPoint(t, beta, "FL", "drop-down from verified anchor")
        return RegionPoint(t, beta, "Unknown")

    def iv_v_corner(self) -> tuple[float, float]:
        """Meeting point of the V upper-left graph with the beta2 curve."""
        f = lambda t: v_curve(t) - beta_curve(self.constants.n2, t)
        ts = np.linspace(self.t3 + 1e-6, self.t_max, 200)
        vals = np.array([f(t) for t in ts])
        idx = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
        if len(idx) == 0:
            raise RuntimeError("no IV/V corner crossing found")
        i = int(idx[-1])
        t_star = brentq(f, ts[i], ts[i + 1], xtol=1e-10)
        return t_star, v_curve(t_star)
