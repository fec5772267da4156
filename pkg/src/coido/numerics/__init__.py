"""Minimal dense numerics: cosine similarity, symmetric eigendecomposition,
seeded k-means++, stable softmax, population variance.

The Jacobi eigensolver is the one hot kernel; a compiled Cython
implementation is preferred and a numpy fallback with identical arithmetic
is selected at import time when the extension is unavailable. Set
``COIDO_BACKEND=numpy`` (or ``cython``) to force a backend.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import (
    Empty,
    InvalidK,
    NoConvergence,
    NonFinite,
    NotSymmetric,
    ZeroVector,
)

from . import _pure

try:  # pragma: no cover - depends on whether the extension was built
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

_env = os.environ.get("COIDO_BACKEND", "").strip().lower()
if _env == "numpy":
    _sweeps = _pure.jacobi_sweeps
    BACKEND = "numpy"
elif _env == "cython":
    if _compiled is None:
        raise ImportError("COIDO_BACKEND=cython but the compiled kernel is not built")
    _sweeps = _compiled.jacobi_sweeps
    BACKEND = "cython"
elif _compiled is not None:
    _sweeps = _compiled.jacobi_sweeps
    BACKEND = "cython"
else:
    _sweeps = _pure.jacobi_sweeps
    BACKEND = "numpy"

_MAX_SWEEPS = 50


def backend_name() -> str:
    """Name of the eigensolver backend selected at import time."""
    return BACKEND


def jacobi_sweeps_with(backend: str, a: np.ndarray, vt: np.ndarray, max_sweeps: int) -> int:
    """Run the raw sweep kernel of an explicit backend (benchmark hook)."""
    if backend == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel not available")
        return _compiled.jacobi_sweeps(a, vt, max_sweeps)
    if backend == "numpy":
        return _pure.jacobi_sweeps(a, vt, max_sweeps)
    raise ValueError(f"unknown backend {backend!r}")


def as_matrix(values, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Validate and return a finite float64 row-major matrix."""
    a = np.ascontiguousarray(values, dtype=np.float64)
    if a.ndim != 2:
        raise NonFinite(f"expected a matrix, got ndim={a.ndim}")
    if rows is not None and a.shape[0] != rows:
        raise NonFinite(f"expected {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise NonFinite(f"expected {cols} cols, got {a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix contains non-finite entries")
    return a


@dataclass(frozen=True)
class SymmetricEigenResult:
    """Full spectrum of a symmetric matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # orthonormal columns, column k pairs with eigenvalue k


def cosine_similarity(u, v) -> float:
    """cos(u, v), clamped to [-1, 1] against round-off.

    Raises ZeroVector when either argument has zero norm; callers that build
    affinity graphs map that case to zero affinity.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise NonFinite(f"length mismatch: {u.shape} vs {v.shape}")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise NonFinite("non-finite input vector")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine similarity undefined for a zero vector")
    return float(np.clip(float(u @ v) / (nu * nv), -1.0, 1.0))


def jacobi_eigh(a) -> SymmetricEigenResult:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Eigenvalues ascending; eigenvector columns orthonormal and sign-fixed so
    the largest-magnitude component of each is positive.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if n == 0:
        raise Empty("empty matrix")
    if a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"matrix is {a.shape[0]}x{a.shape[1]}, not square")
    if n > 1 and float(np.max(np.abs(a - a.T))) > 1e-10:
        raise NotSymmetric("max |A - A^T| exceeds 1e-10")

    work = a.copy()
    vt = np.eye(n)
    used = _sweeps(work, vt, _MAX_SWEEPS)
    if used < 0:
        raise NoConvergence(f"no convergence within {_MAX_SWEEPS} sweeps (n={n})")

    eigenvalues = np.diag(work).copy()
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = vt[order].T.copy()
    for k in range(n):
        col = vectors[:, k]
        if col[int(np.argmax(np.abs(col)))] < 0:
            vectors[:, k] = -col
    return SymmetricEigenResult(eigenvalues=eigenvalues, eigenvectors=vectors)


def batch_softmax(scores) -> np.ndarray:
    """Max-shifted softmax; positive outputs summing to 1."""
    x = np.asarray(scores, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise Empty("softmax needs a non-empty vector")
    if not np.all(np.isfinite(x)):
        raise NonFinite("softmax input contains non-finite entries")
    e = np.exp(x - np.max(x))
    return e / e.sum()


def population_variance(values) -> float:
    """Variance with division by m (not m-1); 0 for a single value."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise Empty("variance of an empty collection")
    if not np.all(np.isfinite(v)):
        raise NonFinite("non-finite values")
    mean = v.mean()
    return float(np.mean((v - mean) ** 2))


def kmeans_pp(points, k: int, seed: int, max_iters: int = 100) -> np.ndarray:
    """Seeded k-means++ with Lloyd refinement; returns the assignment vector.

    Ties in nearest-centroid go to the lowest centroid index; empty clusters
    are re-seeded with the point farthest from its assigned centroid.
    """
    x = as_matrix(points)
    n = x.shape[0]
    if not (1 <= k <= n):
        raise InvalidK(f"k={k} outside [1, {n}]")
    rng = np.random.default_rng(int(seed))

    centroids = np.empty((k, x.shape[1]))
    chosen = [int(rng.integers(n))]
    centroids[0] = x[chosen[0]]
    d2 = np.sum((x - centroids[0]) ** 2, axis=1)
    for j in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            # all remaining points coincide with a centroid; take the lowest
            # index not yet chosen
            idx = next(i for i in range(n) if i not in chosen)
        chosen.append(idx)
        centroids[j] = x[idx]
        d2 = np.minimum(d2, np.sum((x - centroids[j]) ** 2, axis=1))

    assignment = _nearest(x, centroids)
    for _ in range(max_iters):
        reseeded = False
        for j in range(k):
            members = assignment == j
            if members.any():
                centroids[j] = x[members].mean(axis=0)
        dist_own = np.sum((x - centroids[assignment]) ** 2, axis=1)
        for j in range(k):
            if not (assignment == j).any():
                far = int(np.argmax(dist_own))
                centroids[j] = x[far]
                dist_own[far] = -1.0
                reseeded = True
        new_assignment = _nearest(x, centroids)
        if not reseeded and np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
    return assignment


def _nearest(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d = np.sum(x**2, axis=1)[:, None] - 2.0 * (x @ centroids.T) + np.sum(centroids**2, axis=1)[None, :]
    return np.argmin(d, axis=1)
