import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermclust import (
    Digraph,
    Partition,
    ari,
    ci,
    ci_matrix,
    ci_size,
    ci_vol,
    cut_weights,
    misclassified,
    top_pairs,
)
from hermclust.metrics import volume

from conftest import (ari_pair_counting, cut_weights_loop,
                      misclassified_brute, random_digraph, volume_loop)

labels_strategy = st.lists(st.integers(0, 3), min_size=2, max_size=20)


class TestPartition:
    def test_validation(self):
        with pytest.raises(ValueError):
            Partition(labels=np.array([0, 2]), k=2)
        with pytest.raises(ValueError):
            Partition(labels=np.array([0]), k=0)

    def test_empty_clusters_recorded(self):
        part = Partition(labels=np.array([0, 0, 2]), k=3)
        assert part.empty_clusters == [1]


class TestAri:
    def test_identical(self):
        a = Partition.from_labels([0, 0, 1, 1])
        assert ari(a, a) == 1.0

    def test_relabeling_invariant(self):
        a = Partition.from_labels([0, 0, 1, 1])
        b = Partition.from_labels([1, 1, 0, 0])
        assert ari(a, b) == 1.0

    def test_crossed_is_minus_half(self):
        a = Partition.from_labels([0, 0, 1, 1])
        b = Partition.from_labels([0, 1, 0, 1])
        assert ari(a, b) == pytest.approx(-0.5, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ari(Partition.from_labels([0, 1]), Partition.from_labels([0, 1, 0]))

    @given(labels_strategy, st.integers(0, 100))
    @settings(max_examples=40, deadline=None)
    def test_matches_pair_counting_and_symmetry(self, raw, seed):
        rng = np.random.default_rng(seed)
        a = Partition.from_labels(raw)
        b = Partition.from_labels(rng.integers(0, 3, len(raw)))
        got = ari(a, b)
        assert got == pytest.approx(ari_pair_counting(a.labels, b.labels), abs=1e-12)
        assert got == pytest.approx(ari(b, a), abs=1e-12)
        # relabeling by a random permutation leaves ARI unchanged
        perm = rng.permutation(a.k)
        relabeled = Partition.from_labels(perm[a.labels], k=a.k)
        assert ari(relabeled, b) == pytest.approx(got, abs=1e-12)


class TestMisclassified:
    def test_exact_match(self):
        a = Partition.from_labels([0, 0, 1, 1])
        assert misclassified(a, a) == 0

    def test_permutation_absorbed(self):
        truth = Partition.from_labels([0, 0, 1, 1])
        pred = Partition.from_labels([1, 1, 0, 0])
        assert misclassified(pred, truth) == 0

    def test_single_flip_counts_two(self):
        truth = Partition.from_labels([0, 0, 1, 1])
        pred = Partition.from_labels([0, 1, 1, 1], k=2)
        assert misclassified(pred, truth) == 2

    def test_mismatched_k_rejected(self):
        truth = Partition.from_labels([0, 0, 1, 1])
        pred = Partition.from_labels([0, 0, 0, 0], k=1)
        with pytest.raises(ValueError):
            misclassified(pred, truth)

    @given(st.integers(2, 6), st.integers(4, 30), st.integers(0, 1000))
    @settings(max_examples=40, deadline=None)
    def test_matches_brute_force(self, k, n, seed):
        rng = np.random.default_rng(seed)
        truth = Partition.from_labels(rng.integers(0, k, n), k=k)
        pred = Partition.from_labels(rng.integers(0, k, n), k=k)
        assert misclassified(pred, truth) == misclassified_brute(
            pred.labels, truth.labels, k)


class TestCutWeights:
    def test_single_edge(self):
        g = Digraph.from_edges(2, [0], [1])
        assert cut_weights(g, [0], [1]) == (1.0, 0.0)

    def test_disjointness_enforced(self):
        g = Digraph.from_edges(3, [0], [1])
        with pytest.raises(ValueError):
            cut_weights(g, [0, 1], [1, 2])

    def test_weighted(self):
        g = Digraph.from_edges(2, [0, 1], [1, 0], [3.0, 1.0])
        assert cut_weights(g, [0], [1]) == (3.0, 1.0)

    @given(st.integers(0, 500))
    @settings(max_examples=25, deadline=None)
    def test_matches_edge_loop(self, seed):
        rng = np.random.default_rng(seed)
        g = random_digraph(rng, 20, weighted=True)
        verts = rng.permutation(20)
        X, Y = verts[:6], verts[6:13]
        got = cut_weights(g, X, Y)
        want = cut_weights_loop(g, X, Y)
        assert got[0] == pytest.approx(want[0], abs=1e-12)
        assert got[1] == pytest.approx(want[1], abs=1e-12)
        assert volume(g, X) == pytest.approx(volume_loop(g, X), abs=1e-12)


class TestCiFamily:
    def test_quarter(self):
        g = Digraph.from_edges(2, [0, 1], [1, 0], [3.0, 1.0])
        assert ci(g, [0], [1]) == pytest.approx(0.25)

    def test_fully_oriented(self):
        g = Digraph.from_edges(2, [0], [1])
        assert ci(g, [0], [1]) == 0.5

    def test_balanced_and_empty_cut(self):
        g = Digraph.from_edges(2, [0, 1], [1, 0], [2.0, 2.0])
        assert ci(g, [0], [1]) == 0.0
        empty = Digraph.from_edges(4, [0], [1])
        assert ci(empty, [2], [3]) == 0.0  # no edges: defined as 0

    def test_symmetry(self, rng):
        g = random_digraph(rng, 10, weighted=True)
        assert ci(g, [0, 1], [2, 3]) == pytest.approx(ci(g, [2, 3], [0, 1]))

    def test_nonempty_required(self):
        g = Digraph.from_edges(2, [0], [1])
        with pytest.raises(ValueError):
            ci(g, [], [1])

    def test_range_and_identities(self, rng):
        for _ in range(20):
            g = random_digraph(rng, 15, weighted=True)
            X = list(range(0, 5))
            Y = list(range(5, 11))
            c = ci(g, X, Y)
            assert 0.0 <= c <= 0.5
            assert ci_size(g, X, Y) == pytest.approx(c * min(len(X), len(Y)))
            assert ci_vol(g, X, Y) == pytest.approx(
                c * min(volume(g, X), volume(g, Y)))


class TestTopPairs:
    def test_k2_single_pair(self):
        g = Digraph.from_edges(4, [0, 1], [2, 3])
        part = Partition.from_labels([0, 0, 1, 1])
        assert len(top_pairs(g, part, m=10)) == 1

    def test_strong_pair_ranked_first(self, rng):
        # cluster 0 -> cluster 1 fully oriented; 0 <-> 2 balanced
        edges = [(0, 4), (1, 5), (2, 6), (3, 7),  # 0 -> 1
                 (0, 8), (9, 1), (2, 10), (11, 3)]  # balanced 0 <-> 2
        src, dst = zip(*edges)
        g = Digraph.from_edges(12, src, dst)
        part = Partition.from_labels([0] * 4 + [1] * 4 + [2] * 4)
        ranked = top_pairs(g, part, score="ci_size")
        assert (ranked[0].cluster_a, ranked[0].cluster_b) == (0, 1)
        # brute check over all 3 pairs
        scores = {(a, b): ci_size(g, part.members(a), part.members(b))
                  for a in range(3) for b in range(a + 1, 3)}
        assert ranked[0].ci_size == pytest.approx(max(scores.values()))

    def test_m_larger_than_pair_count(self):
        g = Digraph.from_edges(6, [0, 2, 4], [1, 3, 5])
        part = Partition.from_labels([0, 0, 1, 1, 2, 2])
        assert len(top_pairs(g, part, m=100)) == 3

    def test_matches_single_pair_ops(self, rng):
        g = random_digraph(rng, 20, weighted=True)
        part = Partition.from_labels(rng.integers(0, 4, 20), k=4)
        for ps in top_pairs(g, part):
            X = part.members(ps.cluster_a)
            Y = part.members(ps.cluster_b)
            assert ps.ci == pytest.approx(ci(g, X, Y), abs=1e-12)
            assert ps.ci_size == pytest.approx(ci_size(g, X, Y), abs=1e-12)
            assert ps.ci_vol == pytest.approx(ci_vol(g, X, Y), abs=1e-12)


class TestCiMatrix:
    def test_balanced_zero(self):
        g = Digraph.from_edges(4, [0, 2], [2, 0], [1.0, 1.0])
        part = Partition.from_labels([0, 0, 1, 1])
        assert np.all(ci_matrix(g, part) == 0)

    def test_fully_oriented_unit(self):
        g = Digraph.from_edges(4, [0, 1], [2, 3])
        part = Partition.from_labels([0, 0, 1, 1])
        M = ci_matrix(g, part)
        assert M[0, 1] == 1.0 and M[1, 0] == -1.0

    def test_antisymmetric_zero_diagonal(self, rng):
        g = random_digraph(rng, 15, weighted=True)
        part = Partition.from_labels(rng.integers(0, 3, 15), k=3)
        M = ci_matrix(g, part)
        assert np.all(np.diag(M) == 0)
        np.testing.assert_allclose(M, -M.T, atol=1e-12)
