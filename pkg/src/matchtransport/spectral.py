"""Distances between unitary orbits of normal matrices.

The matching distance between spectra, the conjugating unitary that achieves
it, an independent randomized minimizer over the unitary group, and the
Lipschitz functional-calculus probe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack as _lapack

from .errors import MalformedInput, NormalityDefectExceeded, SpaceMismatch
from .matching import bottleneck_match, cyclic_bottleneck_shift
from .spaces import TWO_PI, chordal_distance

CLASSES = ("hermitian", "unitary", "normal")

_DEFECT_REL_TOL = 1e-9


@dataclass(frozen=True)
class NormalMatrix:
    """Dense complex square matrix tagged hermitian, unitary, or normal."""

    array: np.ndarray
    klass: str

    def __post_init__(self):
        a = np.asarray(self.array, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise MalformedInput("matrix must be square and nonempty")
        object.__setattr__(self, "array", a)
        if self.klass not in CLASSES:
            raise MalformedInput(f"class must be one of {CLASSES}")
        scale = max(np.linalg.norm(a, "fro"), 1.0)
        if self.normality_defect > _DEFECT_REL_TOL * scale:
            raise NormalityDefectExceeded(
                f"normality defect {self.normality_defect:.3e} exceeds tolerance"
            )
        if self.klass == "hermitian" and np.linalg.norm(a - a.conj().T, "fro") > 1e-9 * scale:
            raise MalformedInput("matrix tagged hermitian is not self-adjoint")
        if self.klass == "unitary":
            if np.linalg.norm(a.conj().T @ a - np.eye(len(a)), "fro") > 1e-9 * max(1.0, scale):
                raise MalformedInput("matrix tagged unitary is not unitary")

    @property
    def n(self):
        return self.array.shape[0]

    @property
    def normality_defect(self):
        a = self.array
        return float(np.linalg.norm(a @ a.conj().T - a.conj().T @ a, "fro"))


def operator_norm(m):
    return float(np.linalg.norm(m, 2))


def spectral_data(mat: NormalMatrix):
    """Eigenvalues (lexicographic real-then-imaginary order) and a unitary
    diagonalizer with matching column order."""
    a = mat.array
    if mat.klass == "hermitian":
        vals, vecs = np.linalg.eigh(a)
        vals = vals.astype(complex)
    else:
        # complex Schur of a normal matrix is diagonal; columns are orthonormal
        t, q = scipy.linalg.schur(a, output="complex")
        vals = np.diag(t)
        vecs = q
    if mat.klass == "hermitian":
        vals = vals.real.astype(complex)  # imaginary round-off zeroed
    order = np.lexsort((vals.imag, vals.real))
    vals = vals[order]
    vecs = vecs[:, order]
    scale = max(np.linalg.norm(a, "fro"), 1.0)
    recon = vecs @ np.diag(vals) @ vecs.conj().T
    if np.linalg.norm(recon - a, "fro") > 1e-8 * scale:
        raise NormalityDefectExceeded("matrix is not diagonalized by a unitary to tolerance")
    return vals, vecs


def _check_same(a: NormalMatrix, b: NormalMatrix):
    if a.n != b.n:
        raise SpaceMismatch(f"dimensions differ: {a.n} vs {b.n}")


def _pair_class(a: NormalMatrix, b: NormalMatrix):
    return a.klass if a.klass == b.klass else "normal"


def weyl_delta(a: NormalMatrix, b: NormalMatrix):
    """Optimal matching distance between the eigenvalue multisets.

    Hermitian pairs match ascending order against ascending order; unitary
    pairs match anticlockwise orderings by the cyclic matcher; general normal
    pairs use the full bottleneck matching. Returns (value, permutation) with
    permutation indexing eigenvalues in spectral_data order.
    """
    _check_same(a, b)
    la, _ = spectral_data(a)
    lb, _ = spectral_data(b)
    kind = _pair_class(a, b)
    if kind == "hermitian":
        perm = np.arange(a.n)
        value = float(np.abs(la.real - lb.real).max())
        return value, perm
    if kind == "unitary":
        ang_a = np.sort(np.angle(la) % TWO_PI)
        ang_b = np.sort(np.angle(lb) % TWO_PI)
        # lex order and angle order may differ; work in angle order throughout
        oa = np.argsort(np.angle(la) % TWO_PI, kind="stable")
        ob = np.argsort(np.angle(lb) % TWO_PI, kind="stable")
        k, value = cyclic_bottleneck_shift(ang_b, ang_a, 1.0)
        perm = np.empty(a.n, dtype=int)
        perm[oa] = ob[(np.arange(a.n) + k) % a.n]
        return float(value), perm
    match = bottleneck_match(np.abs(la[:, None] - lb[None, :]))
    return match.bottleneck_value, match.permutation


def realizing_unitary(a: NormalMatrix, b: NormalMatrix):
    """Unitary u with ||u a u* - b|| equal to the matching distance.

    u maps a's eigenbasis onto b's eigenbasis along the optimal matching,
    certifying that the orbit distance is at most the matching distance.
    Returns (u, achieved).
    """
    _check_same(a, b)
    value, perm = weyl_delta(a, b)
    _, va = spectral_data(a)
    _, vb = spectral_data(b)
    u = vb[:, perm] @ va.conj().T
    achieved = operator_norm(u @ a.array @ u.conj().T - b.array)
    return u, achieved


_EYE_CACHE = {}


def _cayley(s):
    n = s.shape[-1]
    eye = _EYE_CACHE.get(n)
    if eye is None:
        eye = _EYE_CACHE[n] = np.eye(n)
    return np.linalg.solve(eye - s, eye + s)


def _random_skew(rng, n, count, step):
    z = rng.normal(size=(count, n, n)) + 1j * rng.normal(size=(count, n, n))
    s = (z - np.conj(np.transpose(z, (0, 2, 1)))) / 2.0
    return step * s / np.sqrt(n)


def _schatten(s, p):
    """Overflow-safe Schatten-p norm of singular values along the last axis.

    Assumes `s` sorted descending (as returned by SVD); callers must silence
    float underflow, which is benign here.
    """
    smax = np.maximum(s[..., :1], 1e-300)
    r = ((s / smax) ** p).sum(axis=-1) ** (1.0 / p)
    return smax[..., 0] * r


_LINE_STEPS = np.array([3.0, 1.0, 0.3, 0.1, 0.03, 0.01])
_SOLVE_SCHEDULE = ((12, 6), (60, 10), (240, 15), (2000, 20))
_POLISH_SCHEDULE = ((240, 20), (2000, 60), (30000, 10**9))


def _givens(n, i, j, theta, phi):
    g = np.eye(n, dtype=complex)
    c, s = np.cos(theta), np.sin(theta)
    g[i, i] = c
    g[j, j] = c
    g[i, j] = -np.exp(1j * phi) * s
    g[j, i] = np.exp(-1j * phi) * s
    return g


@np.errstate(under="ignore")
def minimize_orbit_distance(a: NormalMatrix, b: NormalMatrix, budget: int = 20000, seed: int = 0):
    """Local search for inf_u ||u a u* - b|| over the unitary group.

    Riemannian gradient descent on an annealed Schatten-p surrogate of the
    operator norm (p up to 3e4, which smooths ties between leading singular
    values), combined with basin hopping: near-quarter-turn Givens rotations
    that jump between eigenvalue matchings, plus occasional fresh Haar
    starts. The remaining budget polishes the best basin at very high p.
    Deterministic given the seed, and always an upper bound for the true
    orbit distance. Returns (best_value, best_unitary).
    """
    _check_same(a, b)
    if budget <= 0:
        raise MalformedInput("budget must be positive")
    rng = np.random.default_rng(seed)
    n = a.n
    am, bm = a.array, b.array
    evals = [0]

    def batch_value(us, p):
        evals[0] += len(us)
        diff = us @ am @ np.conj(np.transpose(us, (0, 2, 1))) - bm
        return _schatten(np.linalg.svd(diff, compute_uv=False), p)

    def local_solve(u, schedule):
        for p, iters in schedule:
            for _ in range(iters):
                if evals[0] >= budget:
                    return u
                evals[0] += 1
                m = u @ am @ u.conj().T
                # direct LAPACK: same gesdd driver as np.linalg.svd, less wrapper
                w, s, vh, info = _lapack.zgesdd(m - bm)
                if info != 0:
                    w, s, vh = np.linalg.svd(m - bm)
                if s[0] < 1e-150:
                    return u
                fp = _schatten(s, p)
                c = (np.maximum(s, 1e-300) / fp) ** (p - 1)
                zw = (vh.conj().T * c) @ w.conj().T
                g = m @ zw - zw @ m
                gs = (g - g.conj().T) / 2.0
                gn = np.sqrt(np.vdot(gs, gs).real)
                if gn < 1e-14:
                    break
                t = gs / gn
                moved = False
                trial = _LINE_STEPS
                for _round in range(3):
                    props = _cayley(trial[:, None, None] * (0.5 * t)) @ u
                    vals = batch_value(props, p)
                    j = int(np.argmin(vals))
                    if vals[j] < fp:
                        u = props[j]
                        moved = True
                        break
                    trial = trial[-1] * np.array([0.3, 0.1, 0.03, 0.01])
                if not moved:
                    break
        return u

    def value(u):
        evals[0] += 1
        return operator_norm(u @ am @ u.conj().T - bm)

    planes = [(i, j) for i in range(n) for j in range(i + 1, n)]
    best_u = np.eye(n, dtype=complex)
    best_val = operator_norm(am - bm)
    u = local_solve(best_u, _SOLVE_SCHEDULE)
    v = value(u)
    if v < best_val:
        best_val, best_u = v, u
    explore_budget = int(budget * 0.7)
    stale = 0
    while evals[0] < explore_budget and stale < 15:
        if rng.random() < 0.25:
            z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            q, rr = np.linalg.qr(z)
            u = q * (np.diagonal(rr) / np.abs(np.diagonal(rr)))
        elif planes:
            u = best_u
            k = 2 if len(planes) > 1 and rng.random() < 0.35 else 1
            for idx in rng.permutation(len(planes))[:k]:
                i, j = planes[idx]
                u = _givens(n, i, j, np.pi / 2 - rng.uniform(0, 0.3), rng.uniform(0, 2 * np.pi)) @ u
        else:
            break
        u = local_solve(u, _SOLVE_SCHEDULE)
        v = value(u)
        if v < best_val - 1e-10:
            stale = 0
        else:
            stale += 1
        if v < best_val:
            best_val, best_u = v, u
    u = local_solve(best_u, _POLISH_SCHEDULE)
    v = value(u)
    if v < best_val:
        best_val, best_u = v, u
    return float(best_val), best_u


def check_lipschitz(f, region_points, tol=1e-9):
    """Grid check that f is 1-Lipschitz on the given complex sample points."""
    z = np.asarray(region_points, dtype=complex).ravel()
    fz = np.asarray([f(w) for w in z], dtype=complex)
    dz = np.abs(z[:, None] - z[None, :])
    df = np.abs(fz[:, None] - fz[None, :])
    mask = dz > 1e-12
    return bool(np.all(df[mask] <= (1.0 + 1e-9) * dz[mask] + tol))


def _spectral_region(la, lb, grid_n=12):
    pts = np.concatenate([la, lb])
    re = np.linspace(pts.real.min() - 0.1, pts.real.max() + 0.1, grid_n)
    im = np.linspace(pts.imag.min() - 0.1, pts.imag.max() + 0.1, grid_n)
    rr, ii = np.meshgrid(re, im)
    return rr.ravel() + 1j * ii.ravel()


def lipschitz_probe(a: NormalMatrix, b: NormalMatrix, functions, grid_n: int = 12):
    """Evaluate delta(f(a), f(b)) for each 1-Lipschitz scalar function f.

    Functions are applied to eigenvalues (functional calculus) and the images
    rematched; the sup over the family can never exceed delta(a, b). Each f is
    first sanity-checked for 1-Lipschitzness on a grid around the spectra.
    """
    _check_same(a, b)
    la, _ = spectral_data(a)
    lb, _ = spectral_data(b)
    region = _spectral_region(la, lb, grid_n)
    delta_ab, _ = weyl_delta(a, b)
    values = []
    for f in functions:
        if not check_lipschitz(f, region):
            raise MalformedInput("probe function is not 1-Lipschitz on the spectral region")
        fa = np.asarray([f(z) for z in la], dtype=complex)
        fb = np.asarray([f(z) for z in lb], dtype=complex)
        values.append(bottleneck_match(np.abs(fa[:, None] - fb[None, :])).bottleneck_value)
    values = np.array(values)
    sup = float(values.max()) if len(values) else 0.0
    return {
        "values": values,
        "sup": sup,
        "delta": float(delta_ab),
        "ok": bool(sup <= delta_ab + 1e-8),
    }


def distance_to_set_probe(points):
    """The 1-Lipschitz function z -> min distance to a finite set."""
    pts = np.asarray(points, dtype=complex).ravel()

    def f(z):
        return np.abs(z - pts).min()

    return f


# -- random matrix helpers (used by tests, demos, and the CLI fixtures) ------


def random_hermitian(rng, n, scale=1.0):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return NormalMatrix((z + z.conj().T) * (scale / 2.0), "hermitian")


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return NormalMatrix(q, "unitary")


def random_normal(rng, n, scale=1.0):
    u = random_unitary(rng, n).array
    vals = scale * (rng.normal(size=n) + 1j * rng.normal(size=n))
    return NormalMatrix(u @ np.diag(vals) @ u.conj().T, "normal")
