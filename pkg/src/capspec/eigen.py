"""Robin eigenvalues of geodesic disks, one angular index at a time.

Root isolation works on the endpoint Prufer phase of the shooting
solution: Psi(lambda) = (number of interior zeros of g) * pi plus the
angle of (g, sn*g') at theta_end.  Psi increases strictly with lambda, so
the k-th eigenvalue with Robin parameter alpha is the unique root of

    Psi(lambda) = (k-1)*pi + atan2(1, -alpha*sn(theta_end)).

Unlike the raw residual g' + alpha*g, the phase has no poles at Dirichlet
crossings (g(theta_end) = 0), so brackets are never spurious.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .geometry import HYPERBOLIC, SPHERE, SpaceForm
from .radial import (
    ODE_ATOL,
    ODE_RTOL,
    IntegrationError,
    RadialProblem,
    RadialSolution,
    _launch_state,
    _rhs,
    integrate_radial,
    LAUNCH_THETA,
)

LAMBDA_XTOL = 1e-12
RESIDUAL_BOUND = 1e-9
TIE_TOL = 1e-9
MAX_BRACKET_EXPANSIONS = 60


class BracketError(RuntimeError):
    """Could not isolate the requested eigenvalue."""

    def __init__(self, message: str, lam_lo: float, lam_hi: float):
        super().__init__(f"{message} (searched lambda in [{lam_lo:.6g}, {lam_hi:.6g}])")
        self.lam_lo = lam_lo
        self.lam_hi = lam_hi


class DirichletCrossing(ValueError):
    """g(theta_end) = 0: the Robin parameter -g'/g has a pole here."""


def _endpoint_phase(form: SpaceForm, m: int, lam: float, theta_end: float) -> float:
    """Prufer phase at theta_end for the regular solution."""
    problem = RadialProblem(form, m, lam, theta_end)
    y0 = _launch_state(problem, LAUNCH_THETA)

    def crossing(t, y):
        return y[0]

    crossing.direction = 0
    sol = solve_ivp(
        _rhs(form, m, lam),
        (LAUNCH_THETA, theta_end),
        y0,
        method="DOP853",
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        events=crossing,
    )
    if not sol.success:
        raise IntegrationError(sol.message, float(sol.t[-1]))
    g, dg = float(sol.y[0, -1]), float(sol.y[1, -1])
    if not (math.isfinite(g) and math.isfinite(dg)):
        raise IntegrationError("solution overflowed", float(sol.t[-1]))
    nzeros = len(sol.t_events[0])
    sigma = -1.0 if nzeros % 2 else 1.0
    phi = math.atan2(sigma * g, sigma * form.sn(theta_end) * dg)
    if phi <= 0.0:  # endpoint exactly on a Dirichlet crossing
        phi += math.pi
    return nzeros * math.pi + phi


def _phase_target(form: SpaceForm, theta_end: float, m: int, alpha: float, k: int) -> float:
    del m
    return (k - 1) * math.pi + math.atan2(1.0, -alpha * form.sn(theta_end))


@dataclass(frozen=True)
class EigenResult:
    lam: float
    m: int
    k: int
    theta_end: float
    alpha: float
    residual: float
    form: SpaceForm
    solution: RadialSolution = field(repr=False, compare=False)


def _solve_phase_root(form, theta_end, m, alpha, k, lam_hint=None):
    target = _phase_target(form, theta_end, m, alpha, k)
    psi = lambda lam: _endpoint_phase(form, m, lam, theta_end) - target

    if lam_hint is not None:
        lo, hi = lam_hint - 0.5, lam_hint + 0.5
    else:
        # negative eigenvalues scale like -alpha^2 for very negative alpha
        lo = -max(50.0, 4.0 * alpha * alpha)
        hi = 200.0
    flo, fhi = psi(lo), psi(hi)
    for _ in range(MAX_BRACKET_EXPANSIONS):
        if flo < 0.0 <= fhi:
            break
        if flo >= 0.0:
            width = max(hi - lo, 1.0)
            lo -= width
            flo = psi(lo)
        elif fhi < 0.0:
            width = max(hi - lo, 1.0)
            hi += width
            fhi = psi(hi)
    else:
        raise BracketError(
            f"no bracket for eigenvalue m={m}, k={k}, alpha={alpha:.6g}", lo, hi
        )
    return brentq(psi, lo, hi, xtol=LAMBDA_XTOL)


def eigenvalues_for_robin(
    form: SpaceForm,
    theta_end: float,
    m: int,
    alpha: float,
    count: int = 1,
    lam_hints=None,
) -> list[EigenResult]:
    """First `count` Robin eigenvalues for angular index m, in order.

    lam_hints, when given, is a sequence of starting guesses (one per
    ordinal) used to seed the brackets in grid sweeps.
    """
    form.check_theta(theta_end)
    if count < 1:
        raise ValueError("count must be >= 1")
    results = []
    for k in range(1, count + 1):
        hint = None
        if lam_hints is not None and len(lam_hints) >= k and lam_hints[k - 1] is not None:
            hint = lam_hints[k - 1]
        try:
            lam = _solve_phase_root(form, theta_end, m, alpha, k, lam_hint=hint)
        except (BracketError, ValueError):
            if hint is None:
                raise
            lam = _solve_phase_root(form, theta_end, m, alpha, k, lam_hint=None)
        solution = integrate_radial(RadialProblem(form, m, lam, theta_end))
        g, dg = solution.endpoint()
        residual = abs(dg + alpha * g) / math.hypot(g, dg)
        results.append(
            EigenResult(
                lam=lam,
                m=m,
                k=k,
                theta_end=theta_end,
                alpha=alpha,
                residual=residual,
                form=form,
                solution=solution,
            )
        )
    return results


def robin_alpha_for_lambda(form: SpaceForm, theta_end: float, m: int, lam: float) -> float:
    """Robin parameter -g'(theta_end)/g(theta_end) of the regular solution."""
    form.check_theta(theta_end)
    solution = integrate_radial(RadialProblem(form, m, lam, theta_end))
    g, dg = solution.endpoint()
    if abs(g) <= 1e-12 * math.hypot(g, dg):
        raise DirichletCrossing(
            f"g vanishes at theta_end={theta_end:.6g} for lambda={lam:.6g}"
        )
    return -dg / g


@dataclass(frozen=True)
class ModeClassification:
    """Second eigenvalue of the disk and whether it is angular or radial."""

    lambda2: float
    mode: str  # 'Angular' or 'Radial'
    gap: float
    boundary: bool
    lambda_angular: float
    lambda_radial2: float
    lambda_m2: float | None
    dominance_ok: bool | None
    angular_result: EigenResult = field(repr=False, compare=False)


def second_eigen_with_mode(
    form: SpaceForm,
    theta_end: float,
    alpha: float,
    check_dominance: bool = True,
    lam_hints=None,
) -> ModeClassification:
    """Compare the lowest angular (m=1) and second radial (m=0) eigenvalues.

    The second disk eigenvalue is the smaller of the two; the winner names
    the mode.  The lowest m=2 eigenvalue is additionally computed (unless
    disabled) to confirm it exceeds both, so that no mode is missed.
    """
    hints = lam_hints or {}
    ang = eigenvalues_for_robin(
        form, theta_end, 1, alpha, 1, lam_hints=hints.get(1)
    )[0]
    rad = eigenvalues_for_robin(
        form, theta_end, 0, alpha, 2, lam_hints=hints.get(0)
    )[1]
    lam2 = min(ang.lam, rad.lam)
    gap = max(ang.lam, rad.lam) - lam2
    mode = "Angular" if ang.lam <= rad.lam else "Radial"
    lam_m2 = None
    dominance_ok = None
    if check_dominance:
        m2 = eigenvalues_for_robin(
            form, theta_end, 2, alpha, 1, lam_hints=hints.get(2)
        )[0]
        lam_m2 = m2.lam
        dominance_ok = lam_m2 > max(ang.lam, rad.lam) - TIE_TOL
    return ModeClassification(
        lambda2=lam2,
        mode=mode,
        gap=gap,
        boundary=abs(gap) < TIE_TOL,
        lambda_angular=ang.lam,
        lambda_radial2=rad.lam,
        lambda_m2=lam_m2,
        dominance_ok=dominance_ok,
        angular_result=ang,
    )


@dataclass(frozen=True)
class ContourPoint:
    t: float
    beta: float
    theta: float
    K: int


def contour_points(lam: float, form: SpaceForm, thetas) -> tuple[list[ContourPoint], list[float]]:
    """(t, beta) samples of the lowest-angular-eigenvalue contour on one form.

    Apertures where the regular solution hits a Dirichlet crossing are
    omitted and returned in the second list.
    """
    points = []
    skipped = []
    for theta in thetas:
        try:
            alpha = robin_alpha_for_lambda(form, theta, 1, lam)
        except DirichletCrossing:
            skipped.append(float(theta))
            continue
        sn_t = form.sn(theta)
        half = form.sn(theta / 2.0)
        t = 4.0 * math.pi * half * half * form.K
        points.append(ContourPoint(t=t, beta=2.0 * math.pi * sn_t * alpha, theta=float(theta), K=form.K))
    return points, skipped


def contour_curve(lam: float, sphere_thetas=(), hyper_thetas=()):
    """Both halves of a contour (hyperbolic t < 0, spherical t > 0)."""
    pts_h, skip_h = contour_points(lam, HYPERBOLIC, hyper_thetas)
    pts_s, skip_s = contour_points(lam, SPHERE, sphere_thetas)
    points = sorted(pts_h + pts_s, key=lambda p: p.t)
    return points, skip_h + skip_s
