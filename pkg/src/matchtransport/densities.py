"""Densities on axis-aligned boxes, with exact or quadrature box integrals."""

from __future__ import annotations

import numpy as np

from .errors import MalformedInput


class PolynomialDensity:
    """Polynomial density on a box, normalized to total mass one.

    coeffs is a d-dimensional array c[i, j, ...] multiplying
    x0**i * x1**j * ...; box integrals are evaluated analytically from the
    antiderivative, so cell masses are exact up to rounding.
    """

    def __init__(self, coeffs, lo, hi):
        coeffs = np.asarray(coeffs, dtype=float)
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if coeffs.ndim != len(self.lo) or len(self.lo) != len(self.hi):
            raise MalformedInput("coefficient array rank must equal box dimension")
        self.coeffs = coeffs
        self._norm = 1.0
        total = self.box_mass(self.lo, self.hi)
        if total <= 0:
            raise MalformedInput("density must have positive total mass")
        self._norm = 1.0 / total

    @property
    def dimension(self):
        return len(self.lo)

    def __call__(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        vals = np.zeros(len(pts))
        it = np.ndindex(*self.coeffs.shape)
        for idx in it:
            c = self.coeffs[idx]
            if c == 0:
                continue
            term = np.full(len(pts), c)
            for ax, p in enumerate(idx):
                term = term * pts[:, ax] ** p
            vals += term
        return vals * self._norm

    def box_mass(self, lo, hi):
        """Exact integral over the box [lo, hi] (per-axis power antiderivatives)."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        total = 0.0
        for idx in np.ndindex(*self.coeffs.shape):
            c = self.coeffs[idx]
            if c == 0:
                continue
            term = c
            for ax, p in enumerate(idx):
                term *= (hi[ax] ** (p + 1) - lo[ax] ** (p + 1)) / (p + 1)
            total += term
        return total * self._norm


class CallableDensity:
    """Density given by a callable; box masses by fixed-order tensor
    Gauss-Legendre quadrature (exact for smooth densities up to the order)."""

    QUAD_ORDER = 24

    def __init__(self, func, lo, hi, dimension):
        self.func = func
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.dimension = int(dimension)
        nodes, weights = np.polynomial.legendre.leggauss(self.QUAD_ORDER)
        self._nodes = nodes
        self._weights = weights
        self._norm = 1.0
        self._norm = 1.0 / self.box_mass(self.lo, self.hi)

    def __call__(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.asarray(self.func(pts), dtype=float) * self._norm

    def box_mass(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        axes_nodes = []
        axes_weights = []
        for ax in range(self.dimension):
            half = 0.5 * (hi[ax] - lo[ax])
            mid = 0.5 * (hi[ax] + lo[ax])
            axes_nodes.append(mid + half * self._nodes)
            axes_weights.append(half * self._weights)
        grids = np.meshgrid(*axes_nodes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        w = axes_weights[0]
        for aw in axes_weights[1:]:
            w = np.multiply.outer(w, aw)
        vals = np.asarray(self.func(pts), dtype=float).reshape(w.shape)
        return float(np.sum(vals * w)) * self._norm
