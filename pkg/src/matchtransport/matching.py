"""Exact combinatorial matching engines.

Bottleneck matching (binary search over matrix entries plus deterministic
augmenting paths), min-sum assignment, the cyclic matcher for points on a
circle, and the nested bottleneck pair ordering used by the convex-body
transport construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import MalformedInput, SpaceMismatch
from .spaces import TWO_PI, chordal_distance, circular_angle_diff

# all n cyclic shifts are evaluated directly below this size; larger instances
# go through bisection over arc half-widths
CYCLIC_DIRECT_LIMIT = 2048


@dataclass(frozen=True)
class Matching:
    """A permutation pairing rows to columns of a distance matrix."""

    permutation: np.ndarray = field(repr=False)
    bottleneck_value: float
    assignment_value: float

    def pairs(self):
        return list(enumerate(self.permutation.tolist()))


def _check_matrix(d):
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 1:
        raise MalformedInput("distance matrix must be square and nonempty")
    if not np.all(np.isfinite(d)) or np.any(d < 0):
        raise MalformedInput("distance matrix entries must be finite and nonnegative")
    return d


def _perfect_matching_threshold(d, thr):
    """Kuhn's augmenting-path matching on the graph of entries <= thr.

    Rows are processed in ascending order and columns scanned in ascending
    order, which makes the returned matching deterministic. Returns the
    row->col permutation or None if no perfect matching exists.
    """
    n = d.shape[0]
    adj = d <= thr
    match_col = np.full(n, -1, dtype=int)  # col -> row

    def augment(u, seen):
        for j in np.nonzero(adj[u] & ~seen)[0]:
            seen[j] = True
            if match_col[j] < 0 or augment(match_col[j], seen):
                match_col[j] = u
                return True
        return False

    for u in range(n):
        if not augment(u, np.zeros(n, dtype=bool)):
            return None
    perm = np.empty(n, dtype=int)
    perm[match_col] = np.arange(n)
    return perm


def bottleneck_match(d) -> Matching:
    """Permutation minimizing the maximum matched entry.

    Binary search over the sorted multiset of distinct matrix entries; the
    optimum is always an entry. Feasibility at a threshold is a perfect
    matching in the corresponding bipartite threshold graph.
    """
    d = _check_matrix(d)
    vals = np.unique(d)
    lo, hi = 0, len(vals) - 1
    # the max entry is always feasible
    best = _perfect_matching_threshold(d, vals[hi])
    while lo < hi:
        mid = (lo + hi) // 2
        perm = _perfect_matching_threshold(d, vals[mid])
        if perm is not None:
            best = perm
            hi = mid
        else:
            lo = mid + 1
    matched = d[np.arange(len(best)), best]
    return Matching(best, float(matched.max()), float(matched.sum()))


def assignment_match(d) -> Matching:
    """Permutation minimizing the sum of matched entries (exact, cubic time)."""
    d = _check_matrix(d)
    rows, cols = linear_sum_assignment(d)
    perm = np.empty(len(rows), dtype=int)
    perm[rows] = cols
    matched = d[rows, cols]
    return Matching(perm, float(matched.max()), float(matched.sum()))


def _check_sorted_angles(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or len(a) < 1:
        raise MalformedInput(f"{name} must be a nonempty 1-d array of angles")
    if np.any(a < 0) or np.any(a >= TWO_PI):
        raise MalformedInput(f"{name} angles must lie in [0, 2*pi)")
    if np.any(np.diff(a) < 0):
        raise MalformedInput(f"{name} must be sorted anticlockwise")
    return a


def _cyclic_direct(s, t, radius):
    n = len(s)
    idx = (np.arange(n)[None, :] + np.arange(n)[:, None]) % n  # row k: i -> i+k
    worst = chordal_distance(s[idx], t[None, :], radius).max(axis=1)
    k = int(np.argmin(worst))
    return k, float(worst[k])


def _cyclic_feasible_shifts(s3, t2, i, n, half_width):
    """Coverage count per shift k of the constraints angdiff(s_{i+k}, t_i) <= w.

    Takes the source angles tripled (s, s + 2pi, s + 4pi) and the targets
    lifted by 2pi, so every query window [t_i + 2pi - w, t_i + 2pi + w] falls
    inside the tripled range regardless of wraparound. Returns None when some
    constraint admits no source at all (no shift is feasible).
    """
    if half_width >= np.pi:
        return np.full(n, n)
    lo = np.searchsorted(s3, t2 - half_width, side="left")
    hi = np.searchsorted(s3, t2 + half_width, side="right")
    length = hi - lo
    if (length <= 0).any():
        return None
    # source j-window [lo, hi) becomes the cyclic k-window starting at lo - i
    ks = (lo - i) % n
    ke = ks + length
    diff = np.bincount(ks, minlength=2 * n + 1) - np.bincount(ke, minlength=2 * n + 1)
    cover_ext = np.cumsum(diff[: 2 * n])
    return cover_ext[:n] + cover_ext[n:]


def _shift_value(s2, t, k):
    """Exact max angular distance of the shift-k pairing, via a plain slice."""
    d = np.abs(s2[k : k + len(t)] - t)
    d = np.where(d > TWO_PI, d - TWO_PI, d)
    return float(np.minimum(d, TWO_PI - d).max())


def _cyclic_bisect(s, t, radius, angle_bracket=None, shift_hint=None):
    """Bisection over arc half-widths, finished exactly by enumerating the
    feasible shifts once few enough remain."""
    n = len(s)
    s3 = np.concatenate([s, s + TWO_PI, s + 2 * TWO_PI])
    s2 = s3[: 2 * n]
    t2 = t + TWO_PI
    i = np.arange(n)

    def feasible(w):
        cover = _cyclic_feasible_shifts(s3, t2, i, n, w)
        if cover is None:
            return None
        ks = np.nonzero(cover >= n)[0]
        return ks if len(ks) else None

    lo, hi = 0.0, np.pi
    cand = None
    if angle_bracket is not None:
        blo = min(max(float(angle_bracket[0]), 0.0), np.pi)
        bhi = min(max(float(angle_bracket[1]), 0.0), np.pi)
        if blo < np.pi and feasible(blo) is None:
            lo = blo
        if shift_hint is None:
            ks = feasible(bhi)
            if ks is not None:
                hi = bhi
                cand = ks
    if shift_hint is not None:
        # a shift known to be near-optimal gives an achievable upper bound,
        # usually tight enough that one feasibility check finishes the search
        window = [(int(shift_hint) + j) % n for j in range(-4, 5)]
        hint_val = min(_shift_value(s2, t, k) for k in window) + 1e-12  # ulp guard
        if hint_val < hi:
            hi = hint_val
            cand = feasible(hi)
            if cand is not None and len(cand) <= 64:
                lo = hi  # skip the loop; enumeration below is exact
    for _ in range(64):
        if hi - lo < 1e-13:
            break
        mid = 0.5 * (lo + hi)
        ks = feasible(mid)
        if ks is not None:
            hi = mid
            cand = ks
            if len(cand) <= 64:
                break
        else:
            lo = mid
    pad = 1e-12
    while cand is None:
        # float boundary effects can hide the witness by an ulp; pi is
        # always feasible, so the growing pad terminates this
        cand = feasible(hi)
        if cand is None:
            hi = min(np.pi, hi + pad)
            pad *= 2.0
    if len(cand) > 64:
        # near-symmetric instance: every surviving shift is optimal to within
        # the converged bisection width, so scanning a prefix is exact enough
        cand = cand[:64]
    vals = [_shift_value(s2, t, int(k)) for k in cand]
    best = int(np.argmin(vals))
    w = vals[best]
    return int(cand[best]), 2.0 * radius * float(np.sin(min(w, np.pi) / 2.0))


def cyclic_bottleneck_shift(s_angles, t_angles, radius=1.0, bracket=None, shift_hint=None):
    """Best cyclic pairing t_i -> s_{i+k}: returns (k, max chordal distance).

    Among evaluated optimal shifts the smallest k is returned. For sets on a
    circle this shift-restricted optimum equals the unrestricted bottleneck
    optimum. An optional (low, high) chordal bracket and an optional hint for
    the optimal shift narrow the large-instance search; wrong values cost time
    but never change the result.
    """
    s = _check_sorted_angles(s_angles, "s_angles")
    t = _check_sorted_angles(t_angles, "t_angles")
    if len(s) != len(t):
        raise SpaceMismatch(f"angle sets differ in size: {len(s)} vs {len(t)}")
    if len(s) <= CYCLIC_DIRECT_LIMIT:
        return _cyclic_direct(s, t, radius)
    angle_bracket = None
    if bracket is not None:
        c_lo, c_hi = bracket
        to_angle = lambda c: 2.0 * np.arcsin(min(max(c, 0.0), 2.0 * radius) / (2.0 * radius))
        angle_bracket = (to_angle(c_lo), to_angle(c_hi))
    return _cyclic_bisect(s, t, radius, angle_bracket, shift_hint)


def cyclic_bottleneck_match(s_angles, t_angles, radius=1.0) -> Matching:
    """Matching form of cyclic_bottleneck_shift; permutation[i] = (i + k) mod n."""
    k, value = cyclic_bottleneck_shift(s_angles, t_angles, radius)
    n = len(np.asarray(s_angles))
    perm = (np.arange(n) + k) % n
    matched = chordal_distance(np.asarray(s_angles, float)[perm], np.asarray(t_angles, float), radius)
    return Matching(perm, value, float(matched.sum()))


def nested_bottleneck_order(f_points, g_points, space):
    """Reorder pairs so every prefix pair realizes the prefix bottleneck distance.

    Built greedily from the last index down: compute the bottleneck matching of
    the remaining sets, remove a pair attaining the bottleneck value (ties by
    lexicographically smallest original index pair), and assign it the current
    index.

    Returns (f_ordered, g_ordered, f_indices, g_indices).
    """
    f = np.asarray(f_points, dtype=float)
    g = np.asarray(g_points, dtype=float)
    if len(f) != len(g):
        raise SpaceMismatch(f"point sets differ in size: {len(f)} vs {len(g)}")
    m = len(f)
    d_full = space.pairwise(f, g)
    rem_f = list(range(m))
    rem_g = list(range(m))
    order_f = np.empty(m, dtype=int)
    order_g = np.empty(m, dtype=int)
    for i in range(m - 1, -1, -1):
        sub = d_full[np.ix_(rem_f, rem_g)]
        match = bottleneck_match(sub)
        attain = [
            (rem_f[a], rem_g[b])
            for a, b in enumerate(match.permutation)
            if sub[a, b] == match.bottleneck_value
        ]
        fi, gi = min(attain)
        order_f[i] = fi
        order_g[i] = gi
        rem_f.remove(fi)
        rem_g.remove(gi)
    return f[order_f], g[order_g], order_f, order_g


def prefix_bottleneck_values(f_ordered, g_ordered, space):
    """Bottleneck distance of each prefix pair of sets (oracle for the ordering)."""
    vals = []
    for i in range(1, len(f_ordered) + 1):
        d = space.pairwise(f_ordered[:i], g_ordered[:i])
        vals.append(bottleneck_match(d).bottleneck_value)
    return np.array(vals)
