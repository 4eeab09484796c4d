"""Small vectorized geometry helpers: point/segment/polyline distances."""

from __future__ import annotations

import numpy as np


def point_segment_distance(pts, a, b):
    """Distances from an (n, d) point array to the segment [a, b]."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.linalg.norm(pts - a, axis=1)
    t = np.clip((pts - a) @ ab / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.linalg.norm(pts - proj, axis=1)


def point_polyline_distance(pts, poly):
    """Distances from an (n, d) point array to a polyline (k, d)."""
    poly = np.atleast_2d(np.asarray(poly, dtype=float))
    if len(poly) == 1:
        return np.linalg.norm(np.atleast_2d(pts) - poly[0], axis=1)
    best = None
    for a, b in zip(poly[:-1], poly[1:]):
        d = point_segment_distance(pts, a, b)
        best = d if best is None else np.minimum(best, d)
    return best


def segment_segment_distance(p1, q1, p2, q2):
    """Minimum distance between segments [p1, q1] and [p2, q2] in R^d."""
    p1 = np.asarray(p1, float)
    q1 = np.asarray(q1, float)
    p2 = np.asarray(p2, float)
    q2 = np.asarray(q2, float)
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = d1 @ d1
    e = d2 @ d2
    f = d2 @ r
    tiny = 1e-15
    if a <= tiny and e <= tiny:
        return float(np.linalg.norm(r))
    if a <= tiny:
        s, t = 0.0, np.clip(f / e, 0.0, 1.0)
    else:
        c = d1 @ r
        if e <= tiny:
            t = 0.0
            s = np.clip(-c / a, 0.0, 1.0)
        else:
            b = d1 @ d2
            denom = a * e - b * b
            s = np.clip((b * f - c * e) / denom, 0.0, 1.0) if denom > tiny else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = np.clip(-c / a, 0.0, 1.0)
            elif t > 1.0:
                t = 1.0
                s = np.clip((b - c) / a, 0.0, 1.0)
    closest1 = p1 + s * d1
    closest2 = p2 + t * d2
    return float(np.linalg.norm(closest1 - closest2))


def polyline_polyline_distance(pa, pb):
    """Minimum distance between two polylines."""
    pa = np.atleast_2d(np.asarray(pa, dtype=float))
    pb = np.atleast_2d(np.asarray(pb, dtype=float))
    if len(pa) == 1:
        return float(point_polyline_distance(pa, pb)[0])
    if len(pb) == 1:
        return float(point_polyline_distance(pb, pa)[0])
    best = np.inf
    for a1, a2 in zip(pa[:-1], pa[1:]):
        for b1, b2 in zip(pb[:-1], pb[1:]):
            best = min(best, segment_segment_distance(a1, a2, b1, b2))
    return best


def polyline_diameter(poly):
    poly = np.atleast_2d(np.asarray(poly, dtype=float))
    d2 = np.sum((poly[:, None, :] - poly[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(d2.max()))


def simplify_collinear(poly, tol=1e-12):
    """Drop interior vertices lying on the segment through their neighbours."""
    poly = np.atleast_2d(np.asarray(poly, dtype=float))
    if len(poly) <= 2:
        return poly
    keep = [0]
    for i in range(1, len(poly) - 1):
        a = poly[keep[-1]]
        b = poly[i]
        c = poly[i + 1]
        ab = b - a
        ac = c - a
        na = np.linalg.norm(ac)
        if na < tol:
            continue
        # perpendicular distance of b from line a-c
        proj = (ab @ ac) / (na * na)
        perp = np.linalg.norm(ab - proj * ac)
        if perp > tol or not (0.0 <= proj <= 1.0):
            keep.append(i)
    keep.append(len(poly) - 1)
    return poly[keep]
