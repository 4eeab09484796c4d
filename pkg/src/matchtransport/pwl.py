"""Strictly increasing piecewise-linear functions with exact breakpoint arithmetic.

Everything downstream (CDFs, quantiles, transport maps) is built out of these,
so sup-distances and compositions are computed at breakpoints rather than by
sampling.
"""

from __future__ import annotations

import numpy as np

from .errors import MalformedInput

_MERGE_TOL = 1e-14


class PiecewiseLinear:
    """A strictly increasing piecewise-linear bijection between two intervals."""

    def __init__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or len(x) < 2:
            raise MalformedInput("breakpoints must be two equal 1-d arrays, length >= 2")
        if not (np.all(np.diff(x) > 0) and np.all(np.diff(y) > 0)):
            raise MalformedInput("breakpoints must be strictly increasing in both coordinates")
        self.x = x
        self.y = y

    def __call__(self, t):
        return np.interp(t, self.x, self.y)

    @property
    def domain(self):
        return float(self.x[0]), float(self.x[-1])

    def inverse(self) -> "PiecewiseLinear":
        return PiecewiseLinear(self.y, self.x)

    def compose(self, inner: "PiecewiseLinear") -> "PiecewiseLinear":
        """Return self o inner, exact at the union of pulled-back breakpoints."""
        lo, hi = inner.y[0], inner.y[-1]
        pulled = inner.inverse()(np.clip(self.x, lo, hi))
        grid = np.union1d(inner.x, pulled)
        vals = self(inner(grid))
        return PiecewiseLinear(*_dedupe(grid, vals))

    def sup_diff(self, other: "PiecewiseLinear") -> float:
        """sup |self - other| over the common domain; attained at a breakpoint."""
        grid = np.union1d(self.x, other.x)
        return float(np.max(np.abs(self(grid) - other(grid))))

    def sup_displacement(self) -> float:
        """sup |self(t) - t|; the difference is linear between breakpoints."""
        return float(np.max(np.abs(self.y - self.x)))

    def breakpoints(self):
        return np.column_stack([self.x, self.y])


def identity_map(lo=0.0, hi=1.0) -> PiecewiseLinear:
    return PiecewiseLinear([lo, hi], [lo, hi])


def _dedupe(x, y):
    """Drop near-coincident breakpoints produced by composition round-off."""
    keep = np.ones(len(x), dtype=bool)
    keep[1:] = (np.diff(x) > _MERGE_TOL) & (np.diff(y) > 0)
    keep[0] = True
    # never drop the right endpoint; drop its neighbour instead
    if not keep[-1]:
        keep[-1] = True
        idx = np.nonzero(keep)[0]
        prev = idx[idx < len(x) - 1]
        if len(prev) > 1 and (x[-1] - x[prev[-1]] <= _MERGE_TOL or y[-1] - y[prev[-1]] <= 0):
            keep[prev[-1]] = False
    return x[keep], y[keep]
