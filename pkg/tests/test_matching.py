from itertools import permutations

import numpy as np
import pytest

from matchtransport.errors import MalformedInput, SpaceMismatch
from matchtransport.matching import (
    assignment_match,
    bottleneck_match,
    cyclic_bottleneck_match,
    cyclic_bottleneck_shift,
    nested_bottleneck_order,
    prefix_bottleneck_values,
)
from matchtransport.matching import _cyclic_bisect, _cyclic_direct
from matchtransport.spaces import Circle, Interval


def brute_bottleneck(d):
    n = d.shape[0]
    return min(max(d[i, p[i]] for i in range(n)) for p in permutations(range(n)))


def brute_assignment(d):
    n = d.shape[0]
    return min(sum(d[i, p[i]] for i in range(n)) for p in permutations(range(n)))


def test_two_by_two_example():
    d = np.array([[0.1, 0.9], [0.9, 0.1]])
    m = bottleneck_match(d)
    assert m.bottleneck_value == 0.1
    assert list(m.permutation) == [0, 1]


def test_bottleneck_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        d = rng.random((n, n))
        m = bottleneck_match(d)
        assert m.bottleneck_value == pytest.approx(brute_bottleneck(d), abs=0)
        # the reported permutation actually attains the value
        assert d[np.arange(n), m.permutation].max() == m.bottleneck_value


def test_assignment_matches_brute_force():
    rng = np.random.default_rng(1)
    for _ in range(40):
        n = int(rng.integers(1, 7))
        d = rng.random((n, n))
        m = assignment_match(d)
        assert m.assignment_value == pytest.approx(brute_assignment(d), abs=1e-12)


def test_rejects_bad_matrices():
    with pytest.raises(MalformedInput):
        bottleneck_match(np.zeros((2, 3)))
    with pytest.raises(MalformedInput):
        bottleneck_match(np.array([[np.inf]]))
    with pytest.raises(MalformedInput):
        bottleneck_match(np.array([[-1.0]]))


def test_cyclic_equals_full_bottleneck():
    rng = np.random.default_rng(2)
    circle = Circle(1.0)
    for _ in range(60):
        n = int(rng.integers(1, 9))
        s = np.sort(rng.uniform(0, 2 * np.pi, n))
        t = np.sort(rng.uniform(0, 2 * np.pi, n))
        _, v = cyclic_bottleneck_shift(s, t)
        full = bottleneck_match(circle.pairwise(s, t)).bottleneck_value
        assert v == pytest.approx(full, abs=1e-12)


def test_cyclic_match_permutation_attains_value():
    rng = np.random.default_rng(3)
    circle = Circle(1.0)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        s = np.sort(rng.uniform(0, 2 * np.pi, n))
        t = np.sort(rng.uniform(0, 2 * np.pi, n))
        m = cyclic_bottleneck_match(s, t)
        d = circle.pairwise(s, t)
        realized = d[m.permutation, np.arange(n)].max()
        assert realized == pytest.approx(m.bottleneck_value, abs=1e-12)


def test_cyclic_bisect_agrees_with_direct():
    rng = np.random.default_rng(4)
    for _ in range(10):
        n = int(rng.integers(2100, 5000))
        s = np.sort(rng.uniform(0, 2 * np.pi, n))
        t = np.sort(rng.uniform(0, 2 * np.pi, n))
        _, v_direct = _cyclic_direct(s, t, 1.0)
        _, v_bisect = _cyclic_bisect(s, t, 1.0)
        assert v_bisect == pytest.approx(v_direct, abs=1e-11)


def test_cyclic_bisect_hint_and_bracket_never_change_result():
    rng = np.random.default_rng(5)
    n = 3000
    s = np.sort(rng.uniform(0, 2 * np.pi, n))
    t = np.sort(rng.uniform(0, 2 * np.pi, n))
    k, v = _cyclic_direct(s, t, 1.0)
    for hint in (k, (k + n // 2) % n, 0):
        _, v2 = cyclic_bottleneck_shift(s, t, shift_hint=hint)
        assert v2 == pytest.approx(v, abs=1e-11)
    for bracket in ((v - 0.01, v + 0.01), (0.0, v / 2), (v * 2, v * 3)):
        _, v3 = cyclic_bottleneck_shift(s, t, bracket=bracket)
        assert v3 == pytest.approx(v, abs=1e-11)


def test_cyclic_size_mismatch():
    with pytest.raises(SpaceMismatch):
        cyclic_bottleneck_shift([0.0, 1.0], [0.5])


def test_nested_order_prefix_property():
    rng = np.random.default_rng(6)
    space = Interval(0.0, 1.0)
    for _ in range(20):
        m = int(rng.integers(1, 7))
        f = rng.uniform(0, 1, m)
        g = rng.uniform(0, 1, m)
        fo, go, fi, gi = nested_bottleneck_order(f, g, space)
        vals = prefix_bottleneck_values(fo, go, space)
        # each prefix bottleneck is attained by its last pair
        last = np.abs(fo - go)
        assert np.allclose(vals, last, atol=1e-12)
        # prefix bottlenecks are nondecreasing
        assert np.all(np.diff(vals) >= -1e-12)
        # the ordering is a relabeling of the inputs
        assert sorted(fi) == list(range(m)) and sorted(gi) == list(range(m))
