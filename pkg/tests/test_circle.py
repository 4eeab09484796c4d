import numpy as np
import pytest

from matchtransport.circle import (
    build_circle_homeomorphism,
    discretize_circle,
    largest_remainder,
    rotate,
    verify_approximate_transport,
)
from matchtransport.errors import MalformedInput
from matchtransport.matching import cyclic_bottleneck_shift
from matchtransport.measure import CdfMeasure
from matchtransport.spaces import TWO_PI, chordal_distance


def test_largest_remainder_sums_and_proportions():
    rng = np.random.default_rng(0)
    for _ in range(30):
        k = int(rng.integers(1, 20))
        w = rng.uniform(0, 1, k)
        total = int(rng.integers(1, 10_000))
        counts = largest_remainder(w, total)
        assert counts.sum() == total
        assert np.all(np.abs(counts - w / w.sum() * total) < 1.0)
    with pytest.raises(MalformedInput):
        largest_remainder([-1.0, 2.0], 10)


def test_discretize_uniform_equal_counts():
    mu = CdfMeasure.uniform()
    disc = discretize_circle(mu, mu, 4)
    assert np.all(disc.mu_counts == disc.mu_counts[0])
    gaps = np.diff(disc.mu_angles)
    assert np.allclose(gaps, gaps[0], atol=1e-9)


def test_discretize_half_density_proportions():
    # density 3/2 on the upper half, 1/2 on the lower half
    mu = CdfMeasure([(0.0, 0.0), (0.5, 0.75), (1.0, 1.0)])
    disc = discretize_circle(mu, mu, 1)
    assert disc.mu_counts[0] == 3 * disc.M // 4
    assert disc.mu_counts[1] == disc.M // 4


def test_points_stay_in_their_cells():
    rng = np.random.default_rng(1)
    mu = CdfMeasure.random(rng, 5)
    nu = CdfMeasure.random(rng, 5)
    depth = 5
    disc = discretize_circle(mu, nu, depth)
    edges = np.linspace(0, TWO_PI, 2 ** depth + 1)
    for angles, counts in ((disc.mu_angles, disc.mu_counts), (disc.nu_angles, disc.nu_counts)):
        cells = np.repeat(np.arange(2 ** depth), counts)
        assert np.all(angles >= edges[cells] - 1e-9)
        assert np.all(angles <= edges[cells + 1] + 1e-9)


def test_homeo_identity_and_rotation():
    rng = np.random.default_rng(2)
    mu = CdfMeasure.random(rng, 4)
    disc = discretize_circle(mu, mu, 6)
    h = build_circle_homeomorphism(disc)
    assert h.displacement == pytest.approx(0.0, abs=1e-12)
    theta = 0.9
    nu = rotate(mu, theta / TWO_PI)
    disc = discretize_circle(mu, nu, 10)
    h = build_circle_homeomorphism(disc)
    # rotation is a competing transport with chordal displacement 2 sin(theta/2)
    assert h.displacement <= 2 * np.sin(theta / 2) + 2 * disc.cell_bound + 1e-9
    # for a measure concentrated in a tiny arc the bound is attained
    conc = CdfMeasure([(0.0, 0.0), (0.001, 0.999), (1.0, 1.0)])
    disc = discretize_circle(conc, rotate(conc, theta / TWO_PI), 10)
    h = build_circle_homeomorphism(disc)
    assert abs(h.displacement - 2 * np.sin(theta / 2)) <= 2 * disc.cell_bound + 0.02


def test_homeo_maps_anchors_and_preserves_orientation():
    rng = np.random.default_rng(3)
    mu = CdfMeasure.random(rng, 5)
    nu = CdfMeasure.random(rng, 5)
    disc = discretize_circle(mu, nu, 7)
    h = build_circle_homeomorphism(disc)
    images = h(h.source_angles)
    target = h.target_angles % TWO_PI
    d = np.abs(images - target)
    assert np.max(np.minimum(d, TWO_PI - d)) < 1e-9
    # orientation preserving: the modded values wrap around at most once and
    # increase everywhere else, so the lift is monotone with total turn 2 pi
    xs = np.linspace(0, TWO_PI, 4001, endpoint=False)
    ys = h(xs)
    assert np.sum(np.diff(ys) < 0) <= 1
    closed = np.concatenate([ys, ys[:1]])
    steps = np.diff(closed) % TWO_PI
    assert np.sum(steps) == pytest.approx(TWO_PI, abs=1e-9)  # winding number one


def test_displacement_equals_empirical_delta():
    rng = np.random.default_rng(4)
    for _ in range(5):
        mu = CdfMeasure.random(rng, 5)
        nu = CdfMeasure.random(rng, 5)
        disc = discretize_circle(mu, nu, 8)
        h = build_circle_homeomorphism(disc)
        assert h.displacement == pytest.approx(disc.empirical_delta(), abs=1e-9)
        # independent recomputation: max chordal anchor distance
        k, _ = cyclic_bottleneck_shift(disc.nu_angles, disc.mu_angles, disc.radius)
        anchors = chordal_distance(np.roll(disc.nu_angles, -k), disc.mu_angles, 1.0)
        assert h.displacement == pytest.approx(anchors.max(), abs=1e-9)


def test_rotate_is_measure_preserving():
    rng = np.random.default_rng(5)
    mu = CdfMeasure.random(rng, 5)
    nu = rotate(mu, 0.3)
    # total mass of any arc [a, b] equals the mass of the rotated arc
    for a, b in ((0.1, 0.4), (0.5, 0.9), (0.2, 0.75)):
        mass = nu.cdf(b) - nu.cdf(a)
        a0, b0 = (a - 0.3) % 1.0, (b - 0.3) % 1.0
        if a0 <= b0:
            expect = mu.cdf(b0) - mu.cdf(a0)
        else:
            expect = (1.0 - mu.cdf(a0)) + mu.cdf(b0)
        assert mass == pytest.approx(expect, abs=1e-9)


def test_verify_report_converges():
    rng = np.random.default_rng(6)
    mu = CdfMeasure.random(rng, 5)
    nu = CdfMeasure.random(rng, 5)
    recs = verify_approximate_transport(mu, nu, [4, 6, 8])
    bounds = [r["pushforward_bound"] for r in recs]
    assert bounds == sorted(bounds, reverse=True)
    disps = [r["displacement"] for r in recs]
    spread = max(disps) - min(disps)
    assert spread <= recs[0]["pushforward_bound"] + recs[-1]["pushforward_bound"] + 1e-9
    with pytest.raises(MalformedInput):
        verify_approximate_transport(mu, nu, [6, 4])
