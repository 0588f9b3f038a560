"""Seeded k-means++ with Lloyd iterations, deterministic and restartable."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KmeansResult:
    labels: np.ndarray
    centroids: np.ndarray
    cost: float
    iterations: int
    best_restart: int


def _pairwise_sq(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    d2 = (X * X).sum(axis=1)[:, None] + (C * C).sum(axis=1)[None, :] - 2.0 * (X @ C.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def _seed_centroids(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++: first uniform, then proportional to squared distance."""
    n = X.shape[0]
    idx = np.empty(k, dtype=np.int64)
    idx[0] = rng.integers(n)
    d2 = ((X - X[idx[0]]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx[j] = rng.integers(n)
            continue
        r = rng.random() * total
        pick = int(np.searchsorted(np.cumsum(d2), r, side="right"))
        idx[j] = min(pick, n - 1)
        d2 = np.minimum(d2, ((X - X[idx[j]]) ** 2).sum(axis=1))
    return X[idx].copy()


def _repair_empty(X, labels, centroids, d2):
    """Make every cluster nonempty: promote the globally worst-fit point."""
    k = centroids.shape[0]
    repaired = False
    counts = np.bincount(labels, minlength=k)
    while np.any(counts == 0):
        empty = int(np.flatnonzero(counts == 0)[0])
        point_cost = d2[np.arange(X.shape[0]), labels]
        far = int(np.argmax(point_cost))
        counts[labels[far]] -= 1
        labels[far] = empty
        counts[empty] += 1
        centroids[empty] = X[far]
        d2[:, empty] = ((X - X[far]) ** 2).sum(axis=1)
        repaired = True
    return repaired


def _lloyd(X: np.ndarray, k: int, rng: np.random.Generator,
           max_iter: int, tol: float, trace: list | None = None):
    centroids = _seed_centroids(X, k, rng)
    prev_cost = np.inf
    labels = np.zeros(X.shape[0], dtype=np.int64)
    iterations = 0
    for it in range(1, max_iter + 1):
        d2 = _pairwise_sq(X, centroids)
        labels = d2.argmin(axis=1)
        repaired = _repair_empty(X, labels, centroids, d2)
        for j in range(k):
            centroids[j] = X[labels == j].mean(axis=0)
        cost = kmeans_cost(X, labels, centroids)
        iterations = it
        if trace is not None:
            trace.append(cost)
        if __debug__ and not repaired:
            assert cost <= prev_cost + 1e-9 * max(1.0, prev_cost if np.isfinite(prev_cost) else 1.0)
        if cost == 0.0 or (np.isfinite(prev_cost) and prev_cost - cost < tol * max(prev_cost, 1e-300)):
            prev_cost = cost
            break
        prev_cost = cost
    # Final assignment consistent with the returned centroids.
    d2 = _pairwise_sq(X, centroids)
    labels = d2.argmin(axis=1)
    if _repair_empty(X, labels, centroids, d2):
        for j in range(k):
            centroids[j] = X[labels == j].mean(axis=0)
    cost = kmeans_cost(X, labels, centroids)
    return labels, centroids, cost, iterations


def kmeans(features: np.ndarray, k: int, seed: int = 0, restarts: int = 10,
           max_iter: int = 100, tol: float = 1e-6) -> KmeansResult:
    """Best-of-restarts Lloyd clustering; deterministic given the seed."""
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("features must be a 2-D array")
    if X.shape[1] == 0:
        X = np.zeros((X.shape[0], 1))
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    n = X.shape[0]
    if k < 1:
        raise ValueError("k must be at least 1")
    if n < k:
        raise ValueError(f"need at least k={k} points, got {n}")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    if seed < 0:
        raise ValueError("seed must be nonnegative")

    streams = np.random.SeedSequence(seed).spawn(restarts)
    best = None
    for r in range(restarts):
        rng = np.random.Generator(np.random.Philox(streams[r]))
        labels, centroids, cost, iterations = _lloyd(X, k, rng, max_iter, tol)
        if best is None or cost < best.cost:
            best = KmeansResult(labels=labels, centroids=centroids, cost=cost,
                                iterations=iterations, best_restart=r)
    return best


def kmeans_cost(features: np.ndarray, labels: np.ndarray,
                centroids: np.ndarray) -> float:
    """Exact recomputation of the k-means objective."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 2 and X.shape[1] == 0:
        X = np.zeros((X.shape[0], 1))
    diff = X - np.asarray(centroids)[np.asarray(labels)]
    return float((diff * diff).sum())
