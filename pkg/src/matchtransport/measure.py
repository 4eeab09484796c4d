"""Measure representations and the optimal matching distance.

Empirical (uniform, finitely supported) measures get exact combinatorial
values; diffuse measures on the line get exact quantile sup-distances; diffuse
measures on the circle get discretization estimates with certified error
bounds.
"""

from __future__ import annotations

import numpy as np

from .errors import MalformedInput, SpaceMismatch
from .matching import assignment_match, bottleneck_match
from .pwl import PiecewiseLinear
from .spaces import TWO_PI, Circle, ConvexBody, Interval


class EmpiricalMeasure:
    """Uniform measure on n labeled points of a metric space."""

    def __init__(self, space, points):
        points = np.asarray(points, dtype=float)
        if isinstance(space, ConvexBody):
            points = np.atleast_2d(points)
            if points.ndim != 2 or points.shape[1] != space.dimension:
                raise MalformedInput("points must be an (n, dimension) array")
        else:
            points = np.atleast_1d(points)
            if points.ndim != 1:
                raise MalformedInput("points must be a 1-d array for this space")
        if len(points) < 1:
            raise MalformedInput("empirical measure needs at least one point")
        if not space.contains(points):
            raise MalformedInput("some points lie outside the space")
        self.space = space
        self.points = points

    @property
    def n(self):
        return len(self.points)


class CdfMeasure:
    """Fully supported diffuse measure on [0, 1], encoded by a strictly
    increasing piecewise-linear CDF with endpoints (0, 0) and (1, 1).

    Interval measures rescale affinely onto [0, 1]; circle measures use the
    normalized angle parameter angle / (2*pi).
    """

    def __init__(self, breakpoints):
        bp = np.asarray(breakpoints, dtype=float)
        if bp.ndim != 2 or bp.shape[1] != 2 or len(bp) < 2:
            raise MalformedInput("breakpoints must be a (k, 2) array")
        if not (
            abs(bp[0, 0]) < 1e-12
            and abs(bp[0, 1]) < 1e-12
            and abs(bp[-1, 0] - 1) < 1e-12
            and abs(bp[-1, 1] - 1) < 1e-12
        ):
            raise MalformedInput("CDF must run from (0, 0) to (1, 1)")
        bp[0] = (0.0, 0.0)
        bp[-1] = (1.0, 1.0)
        self.cdf = PiecewiseLinear(bp[:, 0], bp[:, 1])

    @classmethod
    def uniform(cls):
        return cls([[0.0, 0.0], [1.0, 1.0]])

    @classmethod
    def from_pwl(cls, f: PiecewiseLinear):
        return cls(np.column_stack([f.x, f.y]))

    @classmethod
    def random(cls, rng, k=4):
        """Random k-interior-breakpoint measure; handy for tests and demos."""
        t = np.sort(rng.uniform(0.05, 0.95, size=k))
        v = np.sort(rng.uniform(0.05, 0.95, size=k))
        t = np.concatenate([[0.0], t, [1.0]])
        v = np.concatenate([[0.0], v, [1.0]])
        if np.any(np.diff(t) < 1e-6) or np.any(np.diff(v) < 1e-6):
            return cls.random(rng, k)
        return cls(np.column_stack([t, v]))

    @property
    def quantile(self) -> PiecewiseLinear:
        return self.cdf.inverse()

    def breakpoints(self):
        return self.cdf.breakpoints()


def _check_pair(mu: EmpiricalMeasure, nu: EmpiricalMeasure):
    if mu.space != nu.space:
        raise SpaceMismatch(f"spaces differ: {mu.space!r} vs {nu.space!r}")
    if mu.n != nu.n:
        raise SpaceMismatch(f"support sizes differ: {mu.n} vs {nu.n}")


def delta_empirical(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """Optimal matching distance between two uniform empirical measures."""
    _check_pair(mu, nu)
    d = mu.space.pairwise(mu.points, nu.points)
    return bottleneck_match(d).bottleneck_value


def wasserstein1_empirical(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """W1 between uniform empirical measures via the exact assignment problem."""
    _check_pair(mu, nu)
    d = mu.space.pairwise(mu.points, nu.points)
    return assignment_match(d).assignment_value / mu.n


def delta_cdf_interval(mu: CdfMeasure, nu: CdfMeasure) -> float:
    """Matching distance of diffuse measures on [0, 1]: sup of |Q_mu - Q_nu|.

    For piecewise-linear CDFs the sup is attained at a breakpoint image and is
    computed exactly.
    """
    return mu.quantile.sup_diff(nu.quantile)


def delta_circle(mu: CdfMeasure, nu: CdfMeasure, depth: int, radius: float = 1.0):
    """Estimate the matching distance of diffuse circle measures.

    Both measures are discretized into 2**depth equal arcs (see the circle
    module); the returned pair is (estimate, error_bound) where the bound
    covers delta(mu, mu_n) + delta(nu, nu_n).
    """
    from . import circle  # deferred; circle builds on this module's types

    if depth < 1:
        raise MalformedInput("depth must be >= 1")
    est, bound, _ = _delta_circle_laddered(mu, nu, depth, radius)
    return est, bound


def _delta_circle_laddered(mu, nu, depth, radius):
    """delta_circle plus the optimal shift, laddered up from coarser depths:
    each coarse run brackets the next bisection and hints its optimal shift."""
    from . import circle

    disc = circle.discretize_circle(mu, nu, depth, radius=radius)
    bracket = None
    hint = None
    if depth >= 8:
        coarse_est, coarse_bound, coarse_k = _delta_circle_laddered(mu, nu, depth - 2, radius)
        pad = coarse_bound + 2.0 * disc.cell_bound + 1e-12
        bracket = (coarse_est - pad, coarse_est + pad)
        hint = coarse_k * 4
    k, est = disc.match(bracket=bracket, shift_hint=hint)
    return est, 2.0 * disc.cell_bound, k


def delta_dispatch(space, mu, nu, depth=None):
    """Route to the right delta for the given space and measure kinds."""
    if isinstance(mu, EmpiricalMeasure) and isinstance(nu, EmpiricalMeasure):
        return delta_empirical(mu, nu), None
    if isinstance(mu, CdfMeasure) and isinstance(nu, CdfMeasure):
        if isinstance(space, Interval):
            return delta_cdf_interval(mu, nu) * space.diameter, None
        if isinstance(space, Circle):
            est, bound = delta_circle(mu, nu, depth if depth else 10, radius=space.radius)
            return est, bound
        raise MalformedInput("cdf measures are supported on intervals and circles only")
    raise SpaceMismatch("measure kinds differ (empirical vs cdf)")
