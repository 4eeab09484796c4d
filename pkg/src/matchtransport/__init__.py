"""Optimal matching distance, transport homeomorphisms, and unitary orbits."""

from .errors import (
    ConstructiveFailure,
    MalformedInput,
    NormalityDefectExceeded,
    SpaceMismatch,
)
from .spaces import Circle, ConvexBody, Interval, chordal_distance, circular_angle_diff
from .pwl import PiecewiseLinear, identity_map
from .measure import (
    CdfMeasure,
    EmpiricalMeasure,
    delta_cdf_interval,
    delta_circle,
    delta_empirical,
    wasserstein1_empirical,
)
from .matching import (
    Matching,
    assignment_match,
    bottleneck_match,
    cyclic_bottleneck_match,
    cyclic_bottleneck_shift,
    nested_bottleneck_order,
    prefix_bottleneck_values,
)
from .interval import (
    TransportMap1D,
    arc_transport,
    increasing_rearrangement,
    verify_lipschitz_section,
)
from .circle import (
    CircleDiscretization,
    CircleHomeomorphism,
    build_circle_homeomorphism,
    discretize_circle,
    largest_remainder,
    rotate,
    verify_approximate_transport,
)
from .densities import CallableDensity, PolynomialDensity
from .convex import (
    BodyDiscretization,
    TubeHomeomorphism,
    approximate_transport_body,
    build_tube_homeomorphism,
    discretize_body,
)
from .spectral import (
    NormalMatrix,
    distance_to_set_probe,
    lipschitz_probe,
    minimize_orbit_distance,
    random_hermitian,
    random_normal,
    random_unitary,
    realizing_unitary,
    spectral_data,
    weyl_delta,
)

__version__ = "0.1.0"
