"""Approximate continuous transport in compact convex bodies.

Diffuse measures are discretized into equal-mass boxes; the discretized
supports are paired by the nested bottleneck ordering; each pair is connected
by a path routed clear of the others; and a homeomorphism supported on
disjoint tubes around the paths relocates every source point onto its target
while moving nothing farther than the bottleneck distance plus a slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import ConstructiveFailure, MalformedInput
from .geometry import (
    point_polyline_distance,
    polyline_diameter,
    polyline_polyline_distance,
    simplify_collinear,
)
from .matching import nested_bottleneck_order
from .measure import EmpiricalMeasure
from .spaces import ConvexBody

_MAX_CELLS = 300_000
_GRID_NODE_CAP = 400_000


# ---------------------------------------------------------------------------
# discretization


@dataclass
class BodyDiscretization:
    """Equal-mass box cells with one support point per cell.

    Every cell has exact measure 1/M and diameter below epsilon, so the
    uniform measure on the support points sits within max_cell_diameter of the
    density in matching distance.
    """

    body: ConvexBody
    epsilon: float
    slices: int
    cells_lo: np.ndarray = field(repr=False)
    cells_hi: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)
    max_cell_diameter: float = 0.0

    @property
    def M(self):
        return len(self.points)

    @property
    def delta_bound(self):
        """Certified upper bound on delta(mu, mu')."""
        return self.max_cell_diameter

    def empirical(self) -> EmpiricalMeasure:
        return EmpiricalMeasure(self.body, self.points)

    def cell_masses(self, density):
        return np.array([density.box_mass(lo, hi) for lo, hi in zip(self.cells_lo, self.cells_hi)])


def _equal_mass_edges(density, lo, hi, axis, k):
    """k+1 edges along `axis` splitting the box [lo, hi] into equal-mass slabs."""
    total = density.box_mass(lo, hi)
    edges = np.empty(k + 1)
    edges[0], edges[-1] = lo[axis], hi[axis]

    def mass_to(x):
        sub_hi = hi.copy()
        sub_hi[axis] = x
        return density.box_mass(lo, sub_hi)

    for j in range(1, k):
        target = total * j / k
        edges[j] = brentq(lambda x: mass_to(x) - target, lo[axis], hi[axis], xtol=1e-14, rtol=8.9e-16)
    return edges


def _build_cells(density, lo, hi, axis, k, out_lo, out_hi):
    if axis == len(lo):
        out_lo.append(lo.copy())
        out_hi.append(hi.copy())
        return
    edges = _equal_mass_edges(density, lo, hi, axis, k)
    for a, b in zip(edges[:-1], edges[1:]):
        sub_lo = lo.copy()
        sub_hi = hi.copy()
        sub_lo[axis] = a
        sub_hi[axis] = b
        _build_cells(density, sub_lo, sub_hi, axis + 1, k, out_lo, out_hi)


def discretize_body(density, body: ConvexBody, epsilon: float, *, slices=None, jitter_seed=0) -> BodyDiscretization:
    """Split an axis-aligned box body into equal-mass cells of diameter < epsilon.

    Slicing is by marginal quantiles (root-finding on exact or quadrature box
    integrals), so cell masses are all exactly 1/M; this is what makes the
    delta(mu, mu') < epsilon certificate a one-line argument. Support points
    sit at jittered cell centers, guaranteeing distinctness.
    """
    if epsilon <= 0:
        raise MalformedInput("epsilon must be positive")
    box = body.as_box()
    if box is None:
        raise MalformedInput("discretize_body supports axis-aligned box bodies")
    lo, hi = box
    dim = body.dimension
    k = int(slices) if slices else max(2, math.ceil(math.sqrt(dim) * 1.2 / epsilon))
    for _ in range(8):
        if k ** dim > _MAX_CELLS:
            raise MalformedInput(
                f"epsilon={epsilon} too small for the integration resolution ({k}^{dim} cells)"
            )
        out_lo, out_hi = [], []
        _build_cells(density, lo.astype(float), hi.astype(float), 0, k, out_lo, out_hi)
        cells_lo = np.array(out_lo)
        cells_hi = np.array(out_hi)
        diams = np.linalg.norm(cells_hi - cells_lo, axis=1)
        if diams.max() < epsilon:
            break
        if slices:
            raise MalformedInput("requested slice count leaves cells wider than epsilon")
        k = math.ceil(k * 1.5)
    else:
        raise MalformedInput(f"could not reach cell diameter < {epsilon}")
    rng = np.random.default_rng(jitter_seed)
    widths = cells_hi - cells_lo
    centers = 0.5 * (cells_lo + cells_hi)
    points = centers + widths * rng.uniform(-0.05, 0.05, size=centers.shape)
    return BodyDiscretization(
        body=body,
        epsilon=float(epsilon),
        slices=k,
        cells_lo=cells_lo,
        cells_hi=cells_hi,
        points=points,
        max_cell_diameter=float(diams.max()),
    )


# ---------------------------------------------------------------------------
# tube homeomorphism


@dataclass
class TubeHomeomorphism:
    """Homeomorphism supported on disjoint tubes around pair-connecting paths.

    Within each tube the map is a chain of radial ball pushes walking the
    source point along the path; it is the identity on tube boundaries and
    everywhere else. Sources land on targets exactly.
    """

    body: ConvexBody
    sources: np.ndarray = field(repr=False)
    targets: np.ndarray = field(repr=False)
    fixed_points: np.ndarray = field(repr=False)
    polylines: list = field(repr=False)
    tube_radius: float = 0.0
    bottleneck: float = 0.0
    epsilon: float = 0.0

    @property
    def displacement_bound(self):
        """Certified sup displacement: no point leaves its tube."""
        if not self.polylines:
            return 0.0
        return max(polyline_diameter(p) for p in self.polylines) + 2.0 * self.tube_radius

    def _centers(self, i):
        return _resample_polyline(self.polylines[i], 0.45 * self.tube_radius)

    def evaluate(self, points):
        """Apply the map to an (n, d) array of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = pts.copy()
        for i, poly in enumerate(self.polylines):
            blo = poly.min(axis=0) - self.tube_radius
            bhi = poly.max(axis=0) + self.tube_radius
            # tubes are disjoint, so the pushes compose freely; select against
            # the current positions because bounding boxes may overlap
            sel = np.all((out >= blo) & (out <= bhi), axis=1)
            if sel.any():
                out[sel] = _apply_pushes(out[sel], self._centers(i), self.tube_radius)
        return out

    def grid_displacement(self, spacing):
        """Max displacement over the regular grid of the given spacing.

        The map is the identity outside the tubes by construction, so only
        grid points inside tube bounding boxes are evaluated.
        """
        box = self.body.as_box()
        if box is None:
            raise MalformedInput("grid_displacement needs a box body")
        lo, hi = box
        worst = 0.0
        for i, poly in enumerate(self.polylines):
            blo = np.maximum(poly.min(axis=0) - 1.5 * self.tube_radius, lo)
            bhi = np.minimum(poly.max(axis=0) + 1.5 * self.tube_radius, hi)
            axes = [
                lo[ax] + spacing * np.arange(
                    math.floor((blo[ax] - lo[ax]) / spacing),
                    math.floor((bhi[ax] - lo[ax]) / spacing) + 1,
                )
                for ax in range(self.body.dimension)
            ]
            grids = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([g.ravel() for g in grids], axis=1)
            if len(pts) == 0:
                continue
            # only points inside the tube move; the bounding box of a diagonal
            # path is vastly larger than the tube itself, so filter first
            centers = self._centers(i)
            for chunk in np.array_split(pts, max(1, len(pts) // 200_000)):
                near = point_polyline_distance(chunk, poly) <= 1.01 * self.tube_radius
                if not near.any():
                    continue
                sub = chunk[near]
                moved = _apply_pushes(sub, centers, self.tube_radius)
                worst = max(worst, float(np.linalg.norm(moved - sub, axis=1).max()))
        return worst

    def certificates(self):
        certs = []
        certs.append(
            {
                "name": "sources_to_targets",
                "lhs": float(np.max(np.linalg.norm(self.evaluate(self.sources) - self.targets, axis=1)))
                if len(self.sources)
                else 0.0,
                "rhs": 0.0,
                "relation": "<=",
            }
        )
        certs.append(
            {
                "name": "displacement_bound",
                "lhs": self.displacement_bound,
                "rhs": self.bottleneck + self.epsilon,
                "relation": "<=",
            }
        )
        if len(self.polylines) > 1:
            min_dist = min(
                polyline_polyline_distance(self.polylines[i], self.polylines[j])
                for i in range(len(self.polylines))
                for j in range(i + 1, len(self.polylines))
            )
            certs.append(
                {
                    "name": "tubes_disjoint",
                    "lhs": 2.0 * self.tube_radius,
                    "rhs": min_dist + 1e-9,
                    "relation": "<=",
                }
            )
        for c in certs:
            c["ok"] = bool(c["lhs"] <= c["rhs"] + 1e-12)
        return certs


def _resample_polyline(poly, step):
    """Points along the polyline at spacing <= step, vertices included,
    endpoints exact."""
    out = [poly[0]]
    for a, b in zip(poly[:-1], poly[1:]):
        seg = b - a
        length = float(np.linalg.norm(seg))
        n = max(1, math.ceil(length / step))
        for j in range(1, n):
            out.append(a + seg * (j / n))
        out.append(b)  # exact vertex, no rounding
    return np.array(out)


def _apply_pushes(pts, centers, rho):
    """Chain of radial ball pushes moving centers[k] to centers[k+1].

    Each push is a homeomorphism supported on the ball of radius rho around
    the current center; the center itself is sent to the next center exactly
    (special-cased so source points land on targets with no rounding).
    """
    out = np.array(pts, dtype=float, copy=True)
    inv_rho = 1.0 / rho
    for a, b in zip(centers[:-1], centers[1:]):
        v = out - a
        t = np.linalg.norm(v, axis=1) * inv_rho
        at_center = t == 0.0
        inside = (t < 1.0) & ~at_center
        if inside.any():
            out[inside] += (1.0 - t[inside])[:, None] * (b - a)
        if at_center.any():
            out[at_center] = b
    return out


# ---------------------------------------------------------------------------
# path routing


def _poly_clearance(poly, obstacles, obstacle_pts):
    d_path = min(
        (polyline_polyline_distance(poly, ob) for ob in obstacles), default=np.inf
    )
    d_pts = (
        float(point_polyline_distance(obstacle_pts, poly).min())
        if len(obstacle_pts)
        else np.inf
    )
    return d_path, d_pts


def _sample_polyline_margin(poly, body):
    return float(body.boundary_margin(poly).min())


def _grid_route_2d(
    x, y, mid, ball_r, obstacles, obstacle_pts, body, rho_t, spacing_factor=1.0, block_factor=3.0
):
    spacing = max(rho_t * spacing_factor, 1e-4)
    lo = mid - ball_r
    n_side = int(2 * ball_r / spacing) + 2
    if n_side * n_side > _GRID_NODE_CAP:
        return None
    ax = lo[0] + spacing * np.arange(n_side)
    ay = lo[1] + spacing * np.arange(n_side)
    gx, gy = np.meshgrid(ax, ay, indexing="ij")
    nodes = np.stack([gx.ravel(), gy.ravel()], axis=1)
    blocked = np.linalg.norm(nodes - mid, axis=1) > ball_r
    blocked |= body.boundary_margin(nodes) < 2.0 * rho_t
    for ob in obstacles:
        blocked |= point_polyline_distance(nodes, ob) < block_factor * rho_t
    if len(obstacle_pts):
        d2 = np.linalg.norm(nodes[:, None, :] - obstacle_pts[None, :, :], axis=-1)
        blocked |= d2.min(axis=1) < block_factor * rho_t
    free = ~blocked

    def node_id(ix, iy):
        return ix * n_side + iy

    rows, cols, data = [], [], []
    offsets = [(1, 0), (0, 1), (1, 1), (1, -1)]
    idx = np.arange(n_side * n_side).reshape(n_side, n_side)
    free2 = free.reshape(n_side, n_side)
    for dx, dy in offsets:
        sl_a = idx[max(0, -dx) : n_side - max(0, dx), max(0, -dy) : n_side - max(0, dy)]
        sl_b = idx[max(0, dx) : n_side + min(0, dx) or None, max(0, dy) : n_side + min(0, dy) or None]
        ok = free[sl_a.ravel()] & free[sl_b.ravel()]
        w = spacing * math.hypot(dx, dy)
        rows.extend(sl_a.ravel()[ok])
        cols.extend(sl_b.ravel()[ok])
        data.extend([w] * int(ok.sum()))
    n_nodes = n_side * n_side + 2
    start_id, end_id = n_nodes - 2, n_nodes - 1
    for pid, p in ((start_id, x), (end_id, y)):
        d = np.linalg.norm(nodes - p, axis=1)
        near = np.nonzero(free & (d <= 2.0 * spacing))[0]
        if len(near) == 0:
            return None
        rows.extend([pid] * len(near))
        cols.extend(near)
        data.extend(d[near])
    graph = coo_matrix((data, (rows, cols)), shape=(n_nodes, n_nodes))
    dist, pred = dijkstra(graph, directed=False, indices=start_id, return_predecessors=True)
    if not np.isfinite(dist[end_id]):
        return None
    chain = [end_id]
    while chain[-1] != start_id:
        chain.append(int(pred[chain[-1]]))
    chain.reverse()
    coords = [x] + [nodes[c] for c in chain[1:-1]] + [y]
    return simplify_collinear(np.array(coords))


def _orth_basis(direction):
    """Orthonormal basis of the complement of `direction`."""
    d = direction / np.linalg.norm(direction)
    dim = len(d)
    basis = []
    for e in np.eye(dim):
        v = e - (e @ d) * d
        for b in basis:
            v = v - (v @ b) * b
        n = np.linalg.norm(v)
        if n > 1e-9:
            basis.append(v / n)
    return basis


def _detour_route(x, y, mid, ball_r, obstacles, obstacle_pts, body, rho_t, epsilon, rng, block_factor=3.0):
    """Straight segment, else a midpoint detour (dimension >= 3): bend the
    path out of the crossing plane, shrinking the detour radius on retries."""
    need_path = block_factor * rho_t
    need_pts = block_factor * rho_t
    base = np.array([x, y])
    d_path, d_pts = _poly_clearance(base, obstacles, obstacle_pts)
    if d_path >= need_path and d_pts >= need_pts and _sample_polyline_margin(base, body) >= 2 * rho_t:
        return base
    basis = _orth_basis(y - x)

    def clearance(cand):
        for pt in cand[1:-1]:
            if np.linalg.norm(pt - mid) > ball_r:
                return -np.inf
        if _sample_polyline_margin(cand, body) < 2 * rho_t:
            return -np.inf
        d_path, d_pts = _poly_clearance(cand, obstacles, obstacle_pts)
        return min(d_path - need_path, d_pts - need_pts)

    # sweep detour radii both below and above epsilon/8: small bends dodge
    # grazing tubes, larger ones go around tubes crossing the segment
    half = 0.5 * np.linalg.norm(y - x)
    r_cap = max(np.sqrt(max(ball_r**2 - half**2, 0.0)) - 2 * rho_t, epsilon / 64.0)
    radii = [r for r in (epsilon / 32.0, epsilon / 16.0, epsilon / 8.0,
                         epsilon / 4.0, epsilon / 2.0, r_cap) if r <= r_cap]
    directions = [v for v in basis] + [-v for v in basis]
    axis = (y - x) / np.linalg.norm(y - x)
    for _ in range(8):
        z = rng.normal(size=len(x))
        z = z - (z @ axis) * axis
        nz = np.linalg.norm(z)
        if nz > 1e-9:
            directions.append(z / nz)
    best = None
    best_clear = -np.inf
    for radius in radii:
        for b in directions:
            off = b * radius
            # single midpoint bend, then a flat two-waypoint channel
            for cand in (
                np.array([x, 0.5 * (x + y) + off, y]),
                np.array([x, x + (y - x) / 3.0 + off, x + 2.0 * (y - x) / 3.0 + off, y]),
            ):
                clear = clearance(cand)
                if clear > best_clear:
                    best_clear = clear
                    best = cand
        if best is not None and best_clear >= 0:
            return best
    return None


def build_tube_homeomorphism(f_points, g_points, body: ConvexBody, epsilon: float, *, seed=0) -> TubeHomeomorphism:
    """Relocation homeomorphism h with h(F) = G and displacement below the
    bottleneck distance of F, G plus epsilon.

    Pairs are put in nested bottleneck order, connected by paths routed clear
    of each other inside the midpoint ball of radius b/2 + epsilon/8, and the
    map is assembled from disjoint tubes. Points common to F and G are kept
    fixed and treated as obstacles. Routing failure raises
    ConstructiveFailure rather than returning a map violating certificates.
    """
    f = np.atleast_2d(np.asarray(f_points, dtype=float))
    g = np.atleast_2d(np.asarray(g_points, dtype=float))
    if f.shape != g.shape:
        raise MalformedInput("F and G must have the same shape")
    if body.dimension < 2 or f.shape[1] != body.dimension:
        raise MalformedInput("points must match a body of dimension >= 2")
    if np.min(body.boundary_margin(np.vstack([f, g]))) <= 0:
        raise MalformedInput("F and G must lie in the interior of the body")
    if len(np.unique(np.round(f, 12), axis=0)) < len(f) or len(np.unique(np.round(g, 12), axis=0)) < len(g):
        raise MalformedInput("points within F and within G must be distinct")
    rng = np.random.default_rng(seed)

    # exact common points stay put and become obstacles
    f_keys = {tuple(p): i for i, p in enumerate(np.round(f, 12))}
    common_f, common_g = [], []
    for j, p in enumerate(np.round(g, 12)):
        if tuple(p) in f_keys:
            common_f.append(f_keys[tuple(p)])
            common_g.append(j)
    move_f = np.setdiff1d(np.arange(len(f)), common_f)
    move_g = np.setdiff1d(np.arange(len(g)), common_g)
    fixed = f[common_f] if common_f else np.empty((0, body.dimension))

    if len(move_f) == 0:
        return TubeHomeomorphism(body, f[:0], g[:0], fixed, [], 0.0, 0.0, float(epsilon))

    fo, go, _, _ = nested_bottleneck_order(f[move_f], g[move_g], body)
    m = len(fo)
    b = float(np.linalg.norm(fo[-1] - go[-1]))  # prefix property: last pair attains b

    terminals = np.vstack([fo, go, fixed]) if len(fixed) else np.vstack([fo, go])
    seps = []
    for i in range(len(terminals)):
        d = np.linalg.norm(terminals - terminals[i], axis=1)
        d[i] = np.inf
        seps.append(d.min())
    min_sep = float(np.min(seps)) if len(terminals) > 1 else np.inf
    margin = float(np.min(body.boundary_margin(terminals)))
    rho_t = min(epsilon / 8.0, 0.2 * min_sep, 0.4 * margin)
    if rho_t <= 1e-7:
        raise ConstructiveFailure(f"no room for tubes: rho target {rho_t:.2e}")

    def _route_all(ball_slack, spacing_factor, block_factor):
        paths = [None] * m
        for i in range(m - 1, -1, -1):  # longest pairs first
            x, y = fo[i], go[i]
            mid = 0.5 * (x + y)
            ball_r = b / 2.0 + ball_slack
            obstacles = [paths[j] for j in range(m) if paths[j] is not None]
            others = np.array(
                [p for j in range(m) if j != i for p in (fo[j], go[j])]
                + [p for p in fixed]
            )
            if body.dimension == 2:
                straight = np.array([x, y])
                d_path, d_pts = _poly_clearance(straight, obstacles, others)
                if (
                    d_path >= 3.0 * rho_t
                    and d_pts >= 3.0 * rho_t
                    and _sample_polyline_margin(straight, body) >= 2 * rho_t
                ):
                    path = straight
                else:
                    path = _grid_route_2d(
                        x, y, mid, ball_r, obstacles, others, body, rho_t,
                        spacing_factor, block_factor,
                    )
            else:
                path = _detour_route(
                    x, y, mid, ball_r, obstacles, others, body, rho_t, epsilon, rng, block_factor
                )
            if path is None:
                raise ConstructiveFailure(f"could not route pair {i} clear of other tubes")
            paths[i] = path
        return paths

    # the tight search ball can be topologically blocked by an earlier path
    # crossing it as a chord; retry with a larger ball and a finer grid, and
    # let the displacement certificate below reject any overlong route
    last_exc = None
    homeo = None
    for ball_slack, spacing_factor, block_factor in (
        (epsilon / 8.0, 1.0, 3.0),
        (epsilon / 4.0, 1.0, 3.0),
        (epsilon / 2.0, 0.5, 2.0),
        (epsilon, 0.5, 1.5),
        (epsilon, 0.25, 1.2),
        (epsilon, 0.25, 1.1),
        (epsilon, 0.15, 1.05),
    ):
        try:
            paths = _route_all(ball_slack, spacing_factor, block_factor)
        except ConstructiveFailure as exc:
            last_exc = exc
            continue

        min_path_dist = min(
            (
                polyline_polyline_distance(paths[i], paths[j])
                for i in range(m)
                for j in range(i + 1, m)
            ),
            default=np.inf,
        )
        min_pt_dist = np.inf
        for i in range(m):
            others = np.array(
                [p for j in range(m) if j != i for p in (fo[j], go[j])] + [p for p in fixed]
            )
            if len(others):
                min_pt_dist = min(min_pt_dist, float(point_polyline_distance(others, paths[i]).min()))
        margin_paths = min(_sample_polyline_margin(p, body) for p in paths)
        rho = min(rho_t, 0.45 * min_path_dist, 0.45 * min_pt_dist, 0.8 * margin_paths)
        if not np.isfinite(rho) or rho <= 1e-9:
            last_exc = ConstructiveFailure(f"tube radius collapsed to {rho:.2e}")
            continue

        candidate = TubeHomeomorphism(
            body=body,
            sources=fo,
            targets=go,
            fixed_points=fixed,
            polylines=paths,
            tube_radius=float(rho),
            bottleneck=b,
            epsilon=float(epsilon),
        )
        if candidate.displacement_bound > b + epsilon + 1e-12:
            last_exc = ConstructiveFailure(
                f"displacement certificate failed: {candidate.displacement_bound:.6f} > {b + epsilon:.6f}"
            )
            continue
        homeo = candidate
        break
    if homeo is None:
        raise last_exc
    return homeo


def approximate_transport_body(mu_density, nu_density, body: ConvexBody, epsilon: float, *, seed=0):
    """Full pipeline: discretize both measures at scale epsilon/2, pair the
    supports, and build the tube homeomorphism pushing nu onto mu.

    Returns (TubeHomeomorphism, certificates).
    """
    disc_mu = discretize_body(mu_density, body, epsilon / 2.0, jitter_seed=seed)
    disc_nu = discretize_body(
        nu_density, body, epsilon / 2.0, slices=disc_mu.slices, jitter_seed=seed + 1
    )
    homeo = build_tube_homeomorphism(disc_nu.points, disc_mu.points, body, epsilon, seed=seed)
    certs = homeo.certificates()
    certs.append(
        {
            "name": "pushforward_defect_bound",
            "lhs": disc_mu.delta_bound + disc_nu.delta_bound,
            "rhs": float(epsilon),
            "relation": "<=",
            "ok": bool(disc_mu.delta_bound + disc_nu.delta_bound <= epsilon + 1e-12),
        }
    )
    return homeo, certs
