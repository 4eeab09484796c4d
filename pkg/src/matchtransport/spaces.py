"""Metric spaces on which measures live: intervals, circles, convex bodies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from .errors import MalformedInput

TWO_PI = 2.0 * np.pi


def circular_angle_diff(s, t):
    """Shorter angular distance between angles s and t (arrays ok)."""
    d = np.abs(np.asarray(s) - np.asarray(t)) % TWO_PI
    return np.minimum(d, TWO_PI - d)


def chordal_distance(s, t, radius=1.0):
    """Distance through the plane between two points of a circle given by angles."""
    return 2.0 * radius * np.sin(circular_angle_diff(s, t) / 2.0)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise MalformedInput(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def diameter(self):
        return self.hi - self.lo

    def metric(self, p, q):
        return abs(float(p) - float(q))

    def pairwise(self, ps, qs):
        ps = np.asarray(ps, dtype=float)
        qs = np.asarray(qs, dtype=float)
        return np.abs(ps[:, None] - qs[None, :])

    def contains(self, ps, tol=1e-9):
        ps = np.asarray(ps, dtype=float)
        return bool(np.all(ps >= self.lo - tol) and np.all(ps <= self.hi + tol))


@dataclass(frozen=True)
class Circle:
    """Circle of given radius; points are angles in [0, 2*pi), metric is chordal."""

    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise MalformedInput("circle radius must be positive")

    @property
    def diameter(self):
        return 2.0 * self.radius

    def metric(self, p, q):
        return float(chordal_distance(p, q, self.radius))

    def pairwise(self, ps, qs):
        ps = np.asarray(ps, dtype=float)
        qs = np.asarray(qs, dtype=float)
        return chordal_distance(ps[:, None], qs[None, :], self.radius)

    def contains(self, ps, tol=1e-9):
        ps = np.asarray(ps, dtype=float)
        return bool(np.all(ps >= -tol) and np.all(ps < TWO_PI + tol))


class ConvexBody:
    """Compact convex subset of R^d given as the convex hull of its vertices.

    Requires d >= 2 and a nonempty interior (full affine rank).
    """

    def __init__(self, dimension, vertices):
        vertices = np.asarray(vertices, dtype=float)
        if dimension < 2:
            raise MalformedInput("convex body dimension must be >= 2")
        if vertices.ndim != 2 or vertices.shape[1] != dimension:
            raise MalformedInput("vertices must be an (m, dimension) array")
        try:
            hull = ConvexHull(vertices)
        except Exception as exc:  # qhull raises its own error types
            raise MalformedInput(f"vertex set has no full-dimensional hull: {exc}")
        self.dimension = int(dimension)
        self.vertices = vertices[hull.vertices]
        self._equations = hull.equations  # rows (normal, offset), n.x + off <= 0 inside

    @property
    def diameter(self):
        v = self.vertices
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))

    def metric(self, p, q):
        return float(np.linalg.norm(np.asarray(p, float) - np.asarray(q, float)))

    def pairwise(self, ps, qs):
        ps = np.asarray(ps, dtype=float)
        qs = np.asarray(qs, dtype=float)
        return np.linalg.norm(ps[:, None, :] - qs[None, :, :], axis=-1)

    def boundary_margin(self, ps):
        """Distance of each point to the nearest supporting hyperplane (negative outside)."""
        ps = np.atleast_2d(np.asarray(ps, dtype=float))
        vals = ps @ self._equations[:, :-1].T + self._equations[:, -1]
        return -vals.max(axis=1)

    def contains(self, ps, tol=1e-9):
        return bool(np.all(self.boundary_margin(ps) >= -tol))

    def as_box(self):
        """Return (lo, hi) if the body is an axis-aligned box, else None."""
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        corners = np.array(
            np.meshgrid(*[(l, h) for l, h in zip(lo, hi)], indexing="ij")
        ).reshape(self.dimension, -1).T
        verts = {tuple(np.round(v, 12)) for v in self.vertices}
        if verts == {tuple(np.round(c, 12)) for c in corners}:
            return lo, hi
        return None

    def __eq__(self, other):
        return (
            isinstance(other, ConvexBody)
            and self.dimension == other.dimension
            and self.vertices.shape == other.vertices.shape
            and np.allclose(self.vertices, other.vertices)
        )

    def __repr__(self):
        return f"ConvexBody(dim={self.dimension}, nvertices={len(self.vertices)})"
