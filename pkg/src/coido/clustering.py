"""Cosine-kNN affinity graph, normalized graph Laplacian, and spectral
clustering into the cluster ids consumed by the diversity loss.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidK, InvalidM, NonFinite, TooFewPoints
from .numerics import jacobi_eigh, kmeans_pp


@dataclass(frozen=True)
class KnnGraph:
    """Symmetric weighted adjacency as per-node neighbor lists, weights in [0, 1]."""

    n: int
    neighbors: list[np.ndarray]  # sorted node indices, no self-loops
    weights: list[np.ndarray]  # aligned affinities


@dataclass(frozen=True)
class ClusterAssignment:
    assignment: np.ndarray  # per-sample cluster id in [0, M)
    M: int

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.M)


def _as_points(features) -> np.ndarray:
    if isinstance(features, np.ndarray):
        pts = np.asarray(features, dtype=np.float64)
    else:
        pts = np.stack([np.asarray(getattr(f, "values", f), dtype=np.float64) for f in features])
    if pts.ndim != 2:
        raise NonFinite("expected a 2-d feature array")
    if not np.all(np.isfinite(pts)):
        raise NonFinite("non-finite feature entries")
    return pts


def build_knn_graph(features, K: int) -> KnnGraph:
    """Link each node to its K highest-cosine neighbors (ties to lower index),
    union-symmetrized; affinity weight is (1 + cosine) / 2.

    Zero vectors have undefined cosine and get affinity 0 everywhere, which
    leaves them isolated.
    """
    pts = _as_points(features)
    n = pts.shape[0]
    if n < 2:
        raise TooFewPoints(f"need at least 2 points, got {n}")
    if not (1 <= K < n):
        raise InvalidK(f"K={K} outside [1, {n - 1}]")

    norms = np.linalg.norm(pts, axis=1)
    nonzero = norms > 0.0
    unit = np.zeros_like(pts)
    unit[nonzero] = pts[nonzero] / norms[nonzero, None]
    cos = np.clip(unit @ unit.T, -1.0, 1.0)

    weight = np.zeros((n, n))
    for i in range(n):
        if not nonzero[i]:
            continue
        order = np.lexsort((np.arange(n), -cos[i]))
        picked = 0
        for j in order:
            if j == i or not nonzero[j]:
                continue
            weight[i, j] = weight[j, i] = (1.0 + cos[i, j]) / 2.0
            picked += 1
            if picked == K:
                break

    neighbors, weights = [], []
    for i in range(n):
        idx = np.flatnonzero(weight[i] > 0.0)
        neighbors.append(idx)
        weights.append(weight[i, idx])
    return KnnGraph(n=n, neighbors=neighbors, weights=weights)


def graph_adjacency(graph: KnnGraph) -> np.ndarray:
    w = np.zeros((graph.n, graph.n))
    for i, (idx, vals) in enumerate(zip(graph.neighbors, graph.weights)):
        w[i, idx] = vals
    return w


def normalized_laplacian(graph: KnnGraph) -> np.ndarray:
    """L = I - D^{-1/2} W D^{-1/2}; an isolated node keeps an identity row."""
    w = graph_adjacency(graph)
    deg = w.sum(axis=1)
    inv_sqrt = np.where(deg > 0.0, 1.0 / np.sqrt(np.where(deg > 0.0, deg, 1.0)), 0.0)
    lap = -w * inv_sqrt[:, None] * inv_sqrt[None, :]
    np.fill_diagonal(lap, 1.0)
    return (lap + lap.T) / 2.0


def spectral_embedding(features, M: int, K: int) -> np.ndarray:
    """Rows of the M bottom eigenvectors of the normalized Laplacian,
    unit-normalized per row (zero rows left as zero)."""
    pts = _as_points(features)
    n = pts.shape[0]
    if not (1 <= M <= n):
        raise InvalidM(f"M={M} outside [1, {n}]")
    graph = build_knn_graph(pts, K)
    lap = normalized_laplacian(graph)
    eig = jacobi_eigh(lap)
    emb = eig.eigenvectors[:, :M].copy()
    row_norms = np.linalg.norm(emb, axis=1)
    keep = row_norms > 0.0
    emb[keep] = emb[keep] / row_norms[keep, None]
    return emb


def spectral_cluster(features, M: int, K: int, seed: int) -> ClusterAssignment:
    """Cluster the spectral embedding with seeded k-means++."""
    emb = spectral_embedding(features, M, K)
    assignment = kmeans_pp(emb, M, seed)
    return ClusterAssignment(assignment=np.asarray(assignment, dtype=np.int64), M=M)


def write_assignment(assignment: ClusterAssignment, ids, path) -> None:
    """Dump ``id<TAB>cluster`` lines in dataset order."""
    from .core import _atomic_write

    lines = [f"{rid}\t{int(c)}" for rid, c in zip(ids, assignment.assignment)]
    _atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))
