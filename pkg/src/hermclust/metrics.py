"""Partition-quality metrics: ARI, permutation misclassification, cut imbalance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import Digraph


@dataclass(frozen=True)
class Partition:
    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if labels.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            raise ValueError("labels must lie in [0, k)")

    @classmethod
    def from_labels(cls, labels, k: int | None = None) -> "Partition":
        labels = np.asarray(labels, dtype=np.int64)
        if k is None:
            k = int(labels.max()) + 1 if labels.size else 1
        return cls(labels=labels, k=k)

    @property
    def n(self) -> int:
        return int(self.labels.size)

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    @property
    def empty_clusters(self) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.sizes == 0)]

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)


@dataclass(frozen=True)
class PairScore:
    cluster_a: int
    cluster_b: int
    ci: float
    ci_size: float
    ci_vol: float


def _contingency(a: Partition, b: Partition) -> np.ndarray:
    table = np.zeros((a.k, b.k), dtype=np.int64)
    np.add.at(table, (a.labels, b.labels), 1)
    return table


def ari(a: Partition, b: Partition) -> float:
    """Adjusted Rand index (Hubert-Arabie permutation-model correction)."""
    if a.n != b.n:
        raise ValueError("partitions must cover the same vertex set")
    table = _contingency(a, b)

    def choose2(x):
        return x * (x - 1) // 2

    sum_ij = int(choose2(table).sum())
    sum_a = int(choose2(table.sum(axis=1)).sum())
    sum_b = int(choose2(table.sum(axis=0)).sum())
    pairs = choose2(a.n)
    if pairs == 0:
        return 1.0
    expected = sum_a * sum_b / pairs
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        return 1.0
    return float((sum_ij - expected) / (maximum - expected))


def misclassified(pred: Partition, truth: Partition) -> int:
    """min over cluster permutations of the symmetric-difference sizes.

    Solved as an optimal assignment on the k x k overlap table; equals
    2*(N - max matching overlap).
    """
    if pred.n != truth.n:
        raise ValueError("partitions must cover the same vertex set")
    if pred.k != truth.k:
        raise ValueError("misclassification count requires equal k")
    table = _contingency(truth, pred)
    rows, cols = linear_sum_assignment(-table)
    overlap = int(table[rows, cols].sum())
    return 2 * (truth.n - overlap)


def _as_index_array(vertices, n: int) -> np.ndarray:
    idx = np.asarray(sorted(set(int(v) for v in vertices)), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ValueError("vertex id out of range")
    return idx


def cut_weights(g: Digraph, X, Y) -> tuple[float, float]:
    """(w(X, Y), w(Y, X)) summed over directed edges."""
    xs = _as_index_array(X, g.n_vertices)
    ys = _as_index_array(Y, g.n_vertices)
    if np.intersect1d(xs, ys).size:
        raise ValueError("X and Y must be disjoint")
    in_x = np.zeros(g.n_vertices, dtype=bool)
    in_x[xs] = True
    in_y = np.zeros(g.n_vertices, dtype=bool)
    in_y[ys] = True
    fwd = float(g.weight[in_x[g.src] & in_y[g.dst]].sum())
    bwd = float(g.weight[in_y[g.src] & in_x[g.dst]].sum())
    return fwd, bwd


def volume(g: Digraph, X) -> float:
    """Sum of in-degrees plus out-degrees over X."""
    xs = _as_index_array(X, g.n_vertices)
    in_x = np.zeros(g.n_vertices, dtype=bool)
    in_x[xs] = True
    return float(g.weight[in_x[g.src]].sum() + g.weight[in_x[g.dst]].sum())


def _ci_from_weights(fwd: float, bwd: float) -> float:
    total = fwd + bwd
    if total == 0:
        return 0.0
    return 0.5 * abs(fwd - bwd) / total


def ci(g: Digraph, X, Y) -> float:
    xs = _as_index_array(X, g.n_vertices)
    ys = _as_index_array(Y, g.n_vertices)
    if not xs.size or not ys.size:
        raise ValueError("X and Y must be nonempty")
    fwd, bwd = cut_weights(g, xs, ys)
    return _ci_from_weights(fwd, bwd)


def ci_size(g: Digraph, X, Y) -> float:
    xs = _as_index_array(X, g.n_vertices)
    ys = _as_index_array(Y, g.n_vertices)
    return ci(g, xs, ys) * min(xs.size, ys.size)


def ci_vol(g: Digraph, X, Y) -> float:
    xs = _as_index_array(X, g.n_vertices)
    ys = _as_index_array(Y, g.n_vertices)
    return ci(g, xs, ys) * min(volume(g, xs), volume(g, ys))


def _cluster_cut_matrix(g: Digraph, partition: Partition) -> np.ndarray:
    W = np.zeros((partition.k, partition.k))
    np.add.at(W, (partition.labels[g.src], partition.labels[g.dst]), g.weight)
    return W


def top_pairs(g: Digraph, partition: Partition, score: str = "ci_size",
              m: int | None = None) -> list[PairScore]:
    """All nonempty unordered cluster pairs scored and ranked."""
    if score not in ("ci", "ci_size", "ci_vol"):
        raise ValueError(f"unknown score {score!r}")
    if partition.n != g.n_vertices:
        raise ValueError("partition does not match the graph")
    W = _cluster_cut_matrix(g, partition)
    sizes = partition.sizes
    vols = W.sum(axis=1) + W.sum(axis=0)  # in-cluster edges count twice
    scores = []
    for a in range(partition.k):
        if sizes[a] == 0:
            continue
        for b in range(a + 1, partition.k):
            if sizes[b] == 0:
                continue
            c = _ci_from_weights(W[a, b], W[b, a])
            scores.append(PairScore(
                cluster_a=a, cluster_b=b, ci=c,
                ci_size=c * min(sizes[a], sizes[b]),
                ci_vol=c * min(vols[a], vols[b]),
            ))
    scores.sort(key=lambda s: (-getattr(s, score), s.cluster_a, s.cluster_b))
    return scores if m is None else scores[:m]


def ci_matrix(g: Digraph, partition: Partition) -> np.ndarray:
    """Signed normalized imbalance per ordered cluster pair; 0/0 -> 0."""
    W = _cluster_cut_matrix(g, partition)
    total = W + W.T
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(total > 0, (W - W.T) / np.where(total > 0, total, 1.0), 0.0)
    np.fill_diagonal(out, 0.0)
    return out
