import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermclust import (
    Digraph,
    HermitianOperator,
    absolute_degrees,
    build_hermitian,
    cap_entries,
    cocluster_products,
    net_flow_transform,
    normalize_rw,
    normalize_sym,
    read_dense_csv,
    read_edge_list,
    symmetrize_naive,
    write_edge_list,
)
from hermclust.spectral import eig_hermitian

from conftest import cocluster_loops, random_digraph


class TestDigraph:
    def test_duplicate_records_sum(self):
        g = Digraph.from_edges(3, [0, 0, 1], [1, 1, 2], [1.0, 2.5, 1.0])
        assert g.n_edges == 2
        M = g.to_dense_adjacency()
        assert M[0, 1] == 3.5
        assert M[1, 2] == 1.0

    def test_self_loops_dropped_with_warning(self):
        with pytest.warns(UserWarning, match="self-loop"):
            g = Digraph.from_edges(2, [0, 0], [0, 1])
        assert g.n_edges == 1
        assert g.dropped_self_loops == 1

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            Digraph.from_edges(2, [0], [2])
        with pytest.raises(ValueError):
            Digraph.from_edges(2, [-1], [0])

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            Digraph.from_edges(2, [0], [1], [-1.0])

    def test_dense_roundtrip(self, rng):
        g = random_digraph(rng, 12, weighted=True)
        g2 = Digraph.from_dense(g.to_dense_adjacency())
        np.testing.assert_allclose(g.to_dense_adjacency(), g2.to_dense_adjacency())


class TestBuildHermitian:
    def test_single_edge(self):
        g = Digraph.from_edges(2, [0], [1])
        A = build_hermitian(g).to_dense()
        np.testing.assert_allclose(A, [[0, 1j], [-1j, 0]])

    def test_weighted_net(self):
        g = Digraph.from_edges(2, [0, 1], [1, 0], [5.0, 2.0])
        A = build_hermitian(g).to_dense()
        assert A[0, 1] == 3j
        assert A[1, 0] == -3j

    def test_reciprocal_cancels(self):
        g = Digraph.from_edges(2, [0, 1], [1, 0], [4.0, 4.0])
        assert np.all(build_hermitian(g).to_dense() == 0)

    def test_empty_graph(self):
        g = Digraph.from_edges(3, [], [])
        assert np.all(build_hermitian(g).to_dense() == 0)

    @given(st.integers(0, 400))
    @settings(max_examples=25, deadline=None)
    def test_hermitian_skew_structure(self, seed):
        rng = np.random.default_rng(seed)
        g = random_digraph(rng, rng.integers(2, 15), weighted=True)
        A = build_hermitian(g).to_dense()
        # exactly Hermitian, zero diagonal, purely imaginary
        assert np.array_equal(A, A.conj().T)
        assert np.all(np.diag(A) == 0)
        assert np.all(A.real == 0)
        S = A.imag
        assert np.all(S + S.T == 0)

    def test_dense_sparse_paths_identical(self, rng):
        g = random_digraph(rng, 30, weighted=True)
        dense = build_hermitian(g, storage="dense").to_dense()
        sparse = build_hermitian(g, storage="sparse").to_dense()
        assert np.array_equal(dense, sparse)


class TestDegreesAndNormalization:
    def test_absolute_degrees_unit(self):
        g = Digraph.from_edges(2, [0], [1])
        A = build_hermitian(g)
        np.testing.assert_allclose(absolute_degrees(A).values, [1, 1])

    def test_absolute_degrees_weighted(self):
        g = Digraph.from_edges(2, [0], [1], [3.0])
        A = build_hermitian(g)
        np.testing.assert_allclose(absolute_degrees(A).values, [3, 3])

    def test_zero_matrix_degrees(self):
        g = Digraph.from_edges(4, [], [])
        A = build_hermitian(g)
        assert np.all(absolute_degrees(A).values == 0)

    def test_normalize_rw_unit_degrees_identity(self):
        g = Digraph.from_edges(2, [0], [1])
        A = build_hermitian(g)
        rw = normalize_rw(A, absolute_degrees(A))
        np.testing.assert_allclose(rw.to_dense(), A.to_dense())

    def test_normalize_rw_scales_rows(self):
        g = Digraph.from_edges(2, [0], [1], [3.0])
        A = build_hermitian(g)
        rw = normalize_rw(A, absolute_degrees(A))
        np.testing.assert_allclose(rw.to_dense(), [[0, 1j], [-1j, 0]])

    def test_isolated_vertex_row_stays_zero(self):
        g = Digraph.from_edges(3, [0], [1])
        A = build_hermitian(g)
        rw = normalize_rw(A, absolute_degrees(A))
        dense = rw.to_dense()
        assert np.all(dense[2] == 0)
        sym = normalize_sym(A, absolute_degrees(A)).to_dense()
        assert np.all(sym[2] == 0) and np.all(sym[:, 2] == 0)

    def test_normalize_sym_entry(self):
        g = Digraph.from_edges(2, [0], [1], [3.0])
        A = build_hermitian(g)
        sym = normalize_sym(A, absolute_degrees(A)).to_dense()
        np.testing.assert_allclose(sym, [[0, 1j], [-1j, 0]])

    def test_normalize_sym_hermitian(self, rng):
        g = random_digraph(rng, 15, weighted=True)
        A = build_hermitian(g)
        sym = normalize_sym(A, absolute_degrees(A))
        assert sym.hermiticity_defect() <= 1e-12

    def test_rw_sym_same_spectrum(self, rng):
        # similarity: identical eigenvalues when no vertex is isolated
        for _ in range(5):
            g = random_digraph(rng, 20, density=0.5, weighted=True)
            A = build_hermitian(g)
            D = absolute_degrees(A)
            if np.any(D.values == 0):
                continue
            sym_vals = np.sort([p.value for p in
                                eig_hermitian(normalize_sym(A, D))])
            rw_dense = normalize_rw(A, D).to_dense()
            rw_vals = np.sort(np.linalg.eigvals(rw_dense).real)
            np.testing.assert_allclose(sym_vals, rw_vals, atol=1e-8)


class TestSymmetrizeAndProducts:
    def test_symmetrize_single_edge(self):
        g = Digraph.from_edges(2, [0], [1])
        S = symmetrize_naive(g)
        assert S[0, 1] == 1 and S[1, 0] == 1

    def test_symmetrize_weighted(self):
        g = Digraph.from_edges(2, [0, 1], [1, 0], [5.0, 2.0])
        S = symmetrize_naive(g)
        assert S[0, 1] == 7

    def test_symmetrize_empty(self):
        g = Digraph.from_edges(3, [], [])
        assert np.all(symmetrize_naive(g) == 0)

    def test_common_parent(self):
        g = Digraph.from_edges(3, [0, 0], [1, 2])
        left, _, _ = cocluster_products(g)
        assert left[1, 2] == 1

    def test_common_offspring(self):
        g = Digraph.from_edges(3, [1, 2], [0, 0])
        _, right, _ = cocluster_products(g)
        assert right[1, 2] == 1

    def test_three_cycle_diagonal(self):
        g = Digraph.from_edges(3, [0, 1, 2], [1, 2, 0])
        _, _, both = cocluster_products(g)
        np.testing.assert_allclose(np.diag(both), [2, 2, 2])

    @given(st.integers(0, 300))
    @settings(max_examples=10, deadline=None)
    def test_squared_hermitian_counts_relations(self, seed):
        # (A^2)_uv = #{common parents or common offspring}
        #          - #{w that is parent of one and offspring of the other}
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 10))
        g = random_digraph(rng, n)
        M = g.to_dense_adjacency()
        A2 = np.linalg.matrix_power(build_hermitian(g).to_dense(), 2)
        for u in range(n):
            for v in range(n):
                agree = sum(M[w, u] * M[w, v] + M[u, w] * M[v, w]
                            for w in range(n))
                clash = sum(M[u, w] * M[w, v] + M[w, u] * M[v, w]
                            for w in range(n))
                assert A2[u, v] == pytest.approx(agree - clash, abs=1e-12)

    @given(st.integers(0, 300))
    @settings(max_examples=10, deadline=None)
    def test_products_match_triple_loop(self, seed):
        rng = np.random.default_rng(seed)
        g = random_digraph(rng, int(rng.integers(2, 12)))
        left, right, both = cocluster_products(g)
        oracle_left, oracle_right = cocluster_loops(g)
        np.testing.assert_allclose(left, oracle_left, atol=1e-12)
        np.testing.assert_allclose(right, oracle_right, atol=1e-12)
        np.testing.assert_allclose(both, oracle_left + oracle_right, atol=1e-12)


class TestNetFlowAndCap:
    def test_net_flow_fractions(self):
        M = np.array([[0.0, 3.0], [1.0, 0.0]])
        g = net_flow_transform(M)
        Mt = g.to_dense_adjacency()
        assert Mt[0, 1] == 0.75 and Mt[1, 0] == 0.25
        A = build_hermitian(g).to_dense()
        assert A[0, 1] == 0.5j

    def test_net_flow_balanced(self):
        M = np.array([[0.0, 2.0], [2.0, 0.0]])
        g = net_flow_transform(M)
        assert np.all(build_hermitian(g).to_dense() == 0)

    def test_net_flow_one_way(self):
        M = np.array([[0.0, 4.0], [0.0, 0.0]])
        g = net_flow_transform(M)
        assert g.to_dense_adjacency()[0, 1] == 1.0
        assert build_hermitian(g).to_dense()[0, 1] == 1j

    def test_net_flow_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            net_flow_transform(np.zeros((2, 3)))

    def test_cap(self):
        M = np.array([[0.0, 25000.0], [5.0, 0.0]])
        capped = cap_entries(M, 10000)
        assert capped[0, 1] == 10000 and capped[1, 0] == 5

    def test_cap_infinite_is_identity(self):
        M = np.array([[0.0, 123.0], [7.0, 0.0]])
        np.testing.assert_array_equal(cap_entries(M, np.inf), M)


class TestIO:
    def test_edge_list_roundtrip(self, tmp_path, rng):
        g = random_digraph(rng, 10, weighted=True)
        path = tmp_path / "g.edges"
        write_edge_list(g, path)
        g2 = read_edge_list(path, n_vertices=10)
        np.testing.assert_allclose(g.to_dense_adjacency(), g2.to_dense_adjacency())

    def test_edge_list_comments_and_default_weight(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("# a comment\n0 1\n1 2 2.5  # trailing\n\n")
        g = read_edge_list(path)
        assert g.n_vertices == 3
        M = g.to_dense_adjacency()
        assert M[0, 1] == 1.0 and M[1, 2] == 2.5

    def test_edge_list_malformed(self, tmp_path):
        path = tmp_path / "bad.edges"
        path.write_text("0 1 2 3\n")
        with pytest.raises(ValueError):
            read_edge_list(path)

    def test_dense_csv(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,3\n1,0\n")
        M = read_dense_csv(path)
        np.testing.assert_allclose(M, [[0, 3], [1, 0]])

    def test_dense_csv_rejects_nonsquare(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,3,1\n1,0,2\n")
        with pytest.raises(ValueError):
            read_dense_csv(path)
