import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermclust import kmeans, kmeans_cost
from hermclust.kmeans import _lloyd, _seed_centroids


def two_blobs(rng, n_per=30, sep=20.0):
    a = rng.standard_normal((n_per, 2)) + [0, 0]
    b = rng.standard_normal((n_per, 2)) + [sep, 0]
    X = np.vstack([a, b])
    truth = np.repeat([0, 1], n_per)
    return X, truth


class TestKmeans:
    def test_recovers_separated_clouds(self, rng):
        X, truth = two_blobs(rng)
        for seed in range(10):
            result = kmeans(X, 2, seed=seed)
            # agreement up to relabeling
            same = (result.labels == truth).mean()
            assert same in (0.0, 1.0)

    def test_identical_points_repair(self):
        X = np.zeros((5, 2))
        result = kmeans(X, 2, seed=0)
        assert result.cost == 0.0
        assert set(result.labels) == {0, 1}

    def test_unit_square_corners(self):
        X = np.array([[0.0, 0], [0, 1], [1, 0], [1, 1]])
        result = kmeans(X, 4, seed=3)
        assert result.cost == 0.0
        assert len(set(result.labels)) == 4

    def test_rejects_bad_inputs(self):
        X = np.zeros((3, 2))
        with pytest.raises(ValueError):
            kmeans(X, 0)
        with pytest.raises(ValueError):
            kmeans(X, 4)
        with pytest.raises(ValueError):
            kmeans(np.array([[np.nan, 0.0]]), 1)

    def test_zero_width_features(self):
        result = kmeans(np.zeros((4, 0)), 2, seed=0)
        assert result.cost == 0.0
        assert set(result.labels) == {0, 1}

    @given(st.integers(0, 1000))
    @settings(max_examples=15, deadline=None)
    def test_seeded_determinism(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((25, 3))
        a = kmeans(X, 3, seed=seed)
        b = kmeans(X, 3, seed=seed)
        assert np.array_equal(a.labels, b.labels)
        assert np.array_equal(a.centroids, b.centroids)
        assert a.cost == b.cost

    def test_result_cost_recomputable(self, rng):
        X = rng.standard_normal((40, 4))
        result = kmeans(X, 5, seed=7)
        recompute = kmeans_cost(X, result.labels, result.centroids)
        assert abs(result.cost - recompute) <= 1e-9
        assert not np.any(np.isnan(result.centroids))
        assert np.all((result.labels >= 0) & (result.labels < 5))

    def test_lloyd_monotone(self, rng):
        X = rng.standard_normal((60, 3))
        for restart_seed in range(5):
            gen = np.random.Generator(np.random.Philox(
                np.random.SeedSequence(restart_seed)))
            trace = []
            _lloyd(X, 4, gen, max_iter=50, tol=0.0, trace=trace)
            assert all(trace[i + 1] <= trace[i] + 1e-9 for i in range(len(trace) - 1))

    def test_ties_break_to_lowest_cluster(self):
        # point exactly between two centroids joins the lower id
        X = np.array([[0.0], [2.0], [1.0]])
        result = kmeans(X, 2, seed=0, restarts=1, max_iter=1)
        # centroid ids depend on seeding; verify via a direct assignment check
        d2 = ((X[:, None, :] - result.centroids[None]) ** 2).sum(-1)
        mids = np.flatnonzero(np.isclose(d2[:, 0], d2[:, 1]))
        for i in mids:
            assert result.labels[i] == 0


class TestSeeding:
    def test_first_uniform_then_distance_squared(self):
        # fixed 3-point instance: squared distances make the far point
        # dominate the second draw
        X = np.array([[0.0], [1.0], [3.0]])
        counts = np.zeros((3, 3), dtype=int)
        draws = 10_000
        streams = np.random.SeedSequence(987).spawn(draws)
        for t in range(draws):
            gen = np.random.Generator(np.random.Philox(streams[t]))
            cents = _seed_centroids(X, 2, gen)
            first = int(np.flatnonzero((X == cents[0]).all(axis=1))[0])
            second = int(np.flatnonzero((X == cents[1]).all(axis=1))[0])
            counts[first, second] += 1

        # chi-square for the first draw being uniform
        first_counts = counts.sum(axis=1)
        expected = draws / 3
        chi2_first = ((first_counts - expected) ** 2 / expected).sum()
        assert chi2_first < 13.8  # 99.9% quantile, 2 dof

        # conditional second-draw law: proportional to squared distance
        chi2_second = 0.0
        dof = 0
        for first in range(3):
            d2 = ((X - X[first]) ** 2).sum(axis=1)
            probs = d2 / d2.sum()
            row = counts[first]
            for j in range(3):
                if probs[j] == 0:
                    assert row[j] == 0
                    continue
                exp = first_counts[first] * probs[j]
                chi2_second += (row[j] - exp) ** 2 / exp
                dof += 1
        assert chi2_second < 22.5  # ~99.9% quantile for 6 dof


class TestCost:
    def test_coincident_zero(self):
        X = np.ones((3, 2))
        assert kmeans_cost(X, [0, 0, 0], np.ones((1, 2))) == 0.0

    def test_distance_two_costs_four(self):
        X = np.array([[2.0, 0.0]])
        assert kmeans_cost(X, [0], np.zeros((1, 2))) == 4.0

    @given(st.integers(0, 300))
    @settings(max_examples=20, deadline=None)
    def test_matches_double_loop(self, seed):
        rng = np.random.default_rng(seed)
        n, d, k = 20, 3, 4
        X = rng.standard_normal((n, d))
        C = rng.standard_normal((k, d))
        labels = rng.integers(0, k, n)
        naive = sum(
            sum((X[i, j] - C[labels[i], j]) ** 2 for j in range(d))
            for i in range(n))
        assert abs(kmeans_cost(X, labels, C) - naive) <= 1e-12 * max(1, naive)
