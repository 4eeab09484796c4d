import numpy as np
import pytest

from matchtransport.errors import (
    MalformedInput,
    NormalityDefectExceeded,
    SpaceMismatch,
)
from matchtransport.matching import bottleneck_match
from matchtransport.spectral import (
    NormalMatrix,
    distance_to_set_probe,
    lipschitz_probe,
    minimize_orbit_distance,
    operator_norm,
    random_hermitian,
    random_normal,
    random_unitary,
    realizing_unitary,
    spectral_data,
    weyl_delta,
)


def test_validation():
    with pytest.raises(NormalityDefectExceeded):
        NormalMatrix(np.array([[0.0, 1.0], [0.0, 0.0]]), "normal")
    with pytest.raises(MalformedInput):
        NormalMatrix(np.diag([1.0, 2.0]), "banana")
    with pytest.raises(MalformedInput):
        NormalMatrix(np.diag([1.0j, 2.0]), "hermitian")
    with pytest.raises(MalformedInput):
        NormalMatrix(np.diag([2.0, 1.0]), "unitary")
    with pytest.raises(SpaceMismatch):
        weyl_delta(
            NormalMatrix(np.diag([1.0]), "hermitian"),
            NormalMatrix(np.diag([1.0, 2.0]), "hermitian"),
        )


def test_spectral_data_reconstructs():
    rng = np.random.default_rng(0)
    for maker in (random_hermitian, random_unitary, random_normal):
        for _ in range(5):
            m = maker(rng, 4)
            vals, vecs = spectral_data(m)
            recon = vecs @ np.diag(vals) @ vecs.conj().T
            assert np.linalg.norm(recon - m.array) < 1e-8
            order = np.lexsort((vals.imag, vals.real))
            assert np.array_equal(order, np.arange(4))


def test_weyl_delta_diag_example():
    a = NormalMatrix(np.diag([0.0, 1.0]), "hermitian")
    b = NormalMatrix(np.diag([0.5, 0.5]), "hermitian")
    v, _ = weyl_delta(a, b)
    assert v == pytest.approx(0.5, abs=0)
    _, achieved = realizing_unitary(a, b)
    assert achieved == pytest.approx(0.5, abs=1e-12)


def test_weyl_agrees_with_full_bottleneck():
    rng = np.random.default_rng(1)
    for maker in (random_hermitian, random_unitary):
        for _ in range(15):
            a, b = maker(rng, 4), maker(rng, 4)
            v, _ = weyl_delta(a, b)
            la, _ = spectral_data(a)
            lb, _ = spectral_data(b)
            full = bottleneck_match(np.abs(la[:, None] - lb[None, :])).bottleneck_value
            assert v == pytest.approx(full, abs=1e-12)


def test_weyl_permutation_attains_value():
    rng = np.random.default_rng(2)
    for maker in (random_hermitian, random_unitary, random_normal):
        for _ in range(10):
            a, b = maker(rng, 5), maker(rng, 5)
            v, perm = weyl_delta(a, b)
            la, _ = spectral_data(a)
            lb, _ = spectral_data(b)
            assert np.abs(la - lb[perm]).max() == pytest.approx(v, abs=1e-12)


def test_unitary_invariance():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a, b = random_normal(rng, 4), random_normal(rng, 4)
        w = random_unitary(rng, 4).array
        aw = NormalMatrix(w @ a.array @ w.conj().T, "normal")
        bw = NormalMatrix(w @ b.array @ w.conj().T, "normal")
        assert weyl_delta(aw, bw)[0] == pytest.approx(weyl_delta(a, b)[0], abs=1e-9)


def test_realizing_unitary_is_unitary_and_achieves():
    rng = np.random.default_rng(4)
    for maker in (random_hermitian, random_unitary, random_normal):
        for _ in range(10):
            a, b = maker(rng, 4), maker(rng, 4)
            v, _ = weyl_delta(a, b)
            u, achieved = realizing_unitary(a, b)
            assert np.linalg.norm(u.conj().T @ u - np.eye(4)) < 1e-10
            assert achieved == pytest.approx(v, abs=1e-8)
            assert operator_norm(u @ a.array @ u.conj().T - b.array) == pytest.approx(
                achieved, abs=0
            )


def test_minimizer_identity_pair_and_determinism():
    rng = np.random.default_rng(5)
    a = random_hermitian(rng, 3)
    best, _ = minimize_orbit_distance(a, a, budget=500, seed=0)
    assert best == 0.0
    b = random_hermitian(rng, 3)
    r1 = minimize_orbit_distance(a, b, budget=2000, seed=11)
    r2 = minimize_orbit_distance(a, b, budget=2000, seed=11)
    assert r1[0] == r2[0]
    assert np.array_equal(r1[1], r2[1])
    with pytest.raises(MalformedInput):
        minimize_orbit_distance(a, b, budget=0)


def test_minimizer_reaches_weyl_value_3x3():
    rng = np.random.default_rng(6)
    for i in range(5):
        a, b = random_hermitian(rng, 3), random_hermitian(rng, 3)
        v, _ = weyl_delta(a, b)
        best, u = minimize_orbit_distance(a, b, budget=20_000, seed=i)
        assert abs(best - v) <= 1e-3
        assert best >= v - 1e-6
        assert operator_norm(u @ a.array @ u.conj().T - b.array) == pytest.approx(best, abs=1e-12)


def test_minimizer_normal_pairs_bracket_delta():
    rng = np.random.default_rng(7)
    for i in range(5):
        a, b = random_normal(rng, 4), random_normal(rng, 4)
        v, _ = weyl_delta(a, b)
        best, _ = minimize_orbit_distance(a, b, budget=8000, seed=i)
        # an honest upper bound that never undercuts the true orbit distance
        assert v - 1e-6 <= best <= operator_norm(a.array - b.array) + 1e-12
        assert best <= v + 1e-2


def test_lipschitz_probe_bounded_by_delta():
    rng = np.random.default_rng(8)
    for _ in range(5):
        a, b = random_normal(rng, 4), random_normal(rng, 4)
        fns = [
            distance_to_set_probe(rng.normal(size=3) + 1j * rng.normal(size=3))
            for _ in range(12)
        ]
        rep = lipschitz_probe(a, b, fns)
        assert rep["ok"]
        assert rep["sup"] <= rep["delta"] + 1e-8
        assert len(rep["values"]) == 12


def test_lipschitz_probe_rejects_expanding_function():
    rng = np.random.default_rng(9)
    a, b = random_hermitian(rng, 3), random_hermitian(rng, 3)
    with pytest.raises(MalformedInput):
        lipschitz_probe(a, b, [lambda z: 3.0 * z])
