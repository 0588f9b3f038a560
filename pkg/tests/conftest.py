"""Shared brute-force oracles and random-instance helpers."""

from itertools import combinations, permutations

import numpy as np
import pytest

from hermclust import Digraph


def random_digraph(rng, n, density=0.3, weighted=False) -> Digraph:
    mask = rng.random((n, n)) < density
    np.fill_diagonal(mask, False)
    M = mask.astype(float)
    if weighted:
        M *= rng.uniform(0.1, 5.0, size=(n, n))
    return Digraph.from_dense(M)


def ari_pair_counting(a, b) -> float:
    """Literal pair-counting Hubert-Arabie ARI."""
    n = len(a)
    pairs = list(combinations(range(n), 2))
    if not pairs:
        return 1.0
    n11 = sum(1 for i, j in pairs if a[i] == a[j] and b[i] == b[j])
    na = sum(1 for i, j in pairs if a[i] == a[j])
    nb = sum(1 for i, j in pairs if b[i] == b[j])
    total = len(pairs)
    expected = na * nb / total
    maximum = (na + nb) / 2
    if maximum == expected:
        return 1.0
    return (n11 - expected) / (maximum - expected)


def misclassified_brute(pred, truth, k) -> int:
    """Exhaustive minimum over S_k of symmetric-difference sizes."""
    n = len(truth)
    best = None
    for sigma in permutations(range(k)):
        tot = 0
        for j in range(k):
            A = {i for i in range(n) if pred[i] == sigma[j]}
            C = {i for i in range(n) if truth[i] == j}
            tot += len(A - C) + len(C - A)
        if best is None or tot < best:
            best = tot
    return best


def cut_weights_loop(g: Digraph, X, Y):
    """Edge-by-edge cut weights."""
    X, Y = set(X), set(Y)
    fwd = bwd = 0.0
    for u, v, w in zip(g.src, g.dst, g.weight):
        if u in X and v in Y:
            fwd += w
        elif u in Y and v in X:
            bwd += w
    return fwd, bwd


def volume_loop(g: Digraph, X):
    X = set(X)
    vol = 0.0
    for u, v, w in zip(g.src, g.dst, g.weight):
        if u in X:
            vol += w
        if v in X:
            vol += w
    return vol


def cocluster_loops(g: Digraph):
    """Triple-loop M^T M and M M^T."""
    n = g.n_vertices
    M = g.to_dense_adjacency()
    left = np.zeros((n, n))
    right = np.zeros((n, n))
    for u in range(n):
        for v in range(n):
            for w in range(n):
                left[u, v] += M[w, u] * M[w, v]
                right[u, v] += M[u, w] * M[v, w]
    return left, right


def random_hermitian(rng, n) -> np.ndarray:
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = (X + X.conj().T) / 2
    np.fill_diagonal(H, np.diag(H).real)
    return H


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
