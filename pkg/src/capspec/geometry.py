"""Constant-curvature primitives: sn/ct functions, planar weights, areas,
and transforms between geodesic radius, conformal radius, and the signed
area coordinate t.

Conventions: curvature K in {-1, 0, +1}; geodesic radius theta in radians
(theta < pi on the sphere); conformal radius r with r < 1 in the
hyperbolic case; t = (disk area) * K, so Euclidean disks sit at t = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Spherical geodesic radii are capped strictly below pi: the radial ODE has a
# coordinate singularity at theta = pi.  The cap keeps t reachable up to
# 4*pi*(1 - 1e-4) ~ 12.565.
THETA_CAP_FRACTION = 1.0 - 1e-4

FOUR_PI = 4.0 * math.pi


class DomainError(ValueError):
    """Argument outside the valid range for the given space form."""


@dataclass(frozen=True)
class SpaceForm:
    """One of the three complete constant-curvature surfaces."""

    K: int

    def __post_init__(self):
        if self.K not in (-1, 0, 1):
            raise DomainError(f"curvature label must be -1, 0 or +1, got {self.K}")

    def sn(self, theta: float) -> float:
        """sin/identity/sinh of theta depending on curvature."""
        if self.K == 1:
            return math.sin(theta)
        if self.K == 0:
            return theta
        return math.sinh(theta)

    def snp(self, theta: float) -> float:
        """Derivative of sn: cos/1/cosh."""
        if self.K == 1:
            return math.cos(theta)
        if self.K == 0:
            return 1.0
        return math.cosh(theta)

    def ct(self, theta: float) -> float:
        """Geodesic cotangent sn'/sn (cot, 1/theta, coth)."""
        return self.snp(theta) / self.sn(theta)

    def max_theta(self) -> float:
        """Largest geodesic radius handled by the solvers."""
        if self.K == 1:
            return math.pi * THETA_CAP_FRACTION
        return math.inf

    def check_theta(self, theta: float) -> float:
        if not theta > 0.0:
            raise DomainError(f"geodesic radius must be positive, got {theta}")
        if theta > self.max_theta():
            raise DomainError(
                f"geodesic radius {theta} exceeds the spherical cap limit "
                f"{self.max_theta():.6f}"
            )
        return theta

    def check_radius(self, r: float) -> float:
        if r < 0.0:
            raise DomainError(f"conformal radius must be nonnegative, got {r}")
        if self.K == -1 and r >= 1.0:
            raise DomainError(f"hyperbolic conformal radius must be < 1, got {r}")
        return r

    def weight(self, r: float) -> float:
        """Planar weight whose metric w |dz|^2 has constant curvature K."""
        self.check_radius(r)
        if self.K == 1:
            return 4.0 / (1.0 + r * r) ** 2
        if self.K == 0:
            return 1.0
        return 4.0 / (1.0 - r * r) ** 2

    def area_a(self, r: float) -> float:
        """Weighted area of the Euclidean disk of radius r."""
        self.check_radius(r)
        if self.K == 1:
            return FOUR_PI * r * r / (1.0 + r * r)
        if self.K == 0:
            return math.pi * r * r
        return FOUR_PI * r * r / (1.0 - r * r)

    def radius_from_area(self, target_area: float) -> float:
        """Closed-form inverse of area_a."""
        if target_area <= 0.0:
            raise DomainError(f"target area must be positive, got {target_area}")
        if self.K == 1:
            if target_area >= FOUR_PI:
                raise DomainError(
                    f"spherical area must be < 4*pi, got {target_area}"
                )
            return math.sqrt(target_area / (FOUR_PI - target_area))
        if self.K == 0:
            return math.sqrt(target_area / math.pi)
        return math.sqrt(target_area / (FOUR_PI + target_area))

    def conformal_radius(self, theta: float) -> float:
        """Stereographic radius tan/id/tanh of theta/2 (Euclidean: theta)."""
        if self.K == 1:
            return math.tan(theta / 2.0)
        if self.K == 0:
            return theta
        return math.tanh(theta / 2.0)

    def theta_of_radius(self, r: float) -> float:
        self.check_radius(r)
        if self.K == 1:
            return 2.0 * math.atan(r)
        if self.K == 0:
            return r
        return 2.0 * math.atanh(r)


SPHERE = SpaceForm(1)
EUCLIDEAN = SpaceForm(0)
HYPERBOLIC = SpaceForm(-1)

FORMS = {1: SPHERE, 0: EUCLIDEAN, -1: HYPERBOLIC}


@dataclass(frozen=True)
class CapCoordinates:
    """Coordinates of one geodesic disk: radius, signed area, area, length."""

    theta: float
    t: float
    area: float
    boundary_length: float


def sn(form: SpaceForm, theta: float) -> float:
    return form.sn(theta)


def ct(form: SpaceForm, theta: float) -> float:
    return form.ct(theta)


def weight(form: SpaceForm, r: float) -> float:
    return form.weight(r)


def area_a(form: SpaceForm, r: float) -> float:
    return form.area_a(r)


def radius_from_area(form: SpaceForm, target_area: float) -> float:
    return form.radius_from_area(target_area)


def cap_coordinates(form: SpaceForm, theta: float) -> CapCoordinates:
    """Signed area coordinate, weighted area and boundary length of a cap."""
    form.check_theta(theta)
    half = form.sn(theta / 2.0)
    area = FOUR_PI * half * half
    return CapCoordinates(
        theta=theta,
        t=area * form.K,
        area=area,
        boundary_length=2.0 * math.pi * form.sn(theta),
    )


def theta_from_t(form: SpaceForm, t: float) -> float:
    """Inverse of cap_coordinates, geodesic radius from the signed area.

    Euclidean disks all have t = 0, so the inverse is only defined for
    K = +1 (t in (0, 4*pi)) and K = -1 (t < 0).
    """
    if form.K == 1:
        if not 0.0 < t < FOUR_PI:
            raise DomainError(f"spherical t must lie in (0, 4*pi), got {t}")
        theta = 2.0 * math.asin(math.sqrt(t / FOUR_PI))
        return form.check_theta(theta)
    if form.K == -1:
        if not t < 0.0:
            raise DomainError(f"hyperbolic t must be negative, got {t}")
        return 2.0 * math.asinh(math.sqrt(-t / FOUR_PI))
    raise DomainError("t does not determine a radius in the Euclidean case")


def form_for_t(t: float) -> SpaceForm:
    """Space form implied by the sign of the area coordinate."""
    if t > 0.0:
        return SPHERE
    if t < 0.0:
        return HYPERBOLIC
    return EUCLIDEAN
