"""Robin spectra of geodesic disks on constant-curvature surfaces."""

from .geometry import (
    EUCLIDEAN,
    HYPERBOLIC,
    SPHERE,
    CapCoordinates,
    DomainError,
    SpaceForm,
    area_a,
    cap_coordinates,
    form_for_t,
    radius_from_area,
    theta_from_t,
    weight,
)
from .radial import (
    IntegrationError,
    RadialProblem,
    RadialSolution,
    ShapeProfile,
    integrate_radial,
    legendre_radial,
    legendre_radial_many,
    log_derivative_at,
    shape_profile,
)

__version__ = "0.1.0"
