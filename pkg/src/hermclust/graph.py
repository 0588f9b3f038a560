"""Directed graph data model and the matrix operators derived from it."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

# Dense operators up to this many vertices, coordinate-sparse above.
DENSE_LIMIT = 4096


@dataclass(frozen=True)
class Digraph:
    """Weighted directed graph with canonical edge storage.

    Edges are stored as parallel arrays (src, dst, weight) with at most one
    record per ordered pair, no self-loops, and strictly positive weights.
    Use :meth:`from_edges` or :meth:`from_dense` instead of the raw
    constructor so these invariants hold.
    """

    n_vertices: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    dropped_self_loops: int = 0

    @classmethod
    def from_edges(cls, n_vertices, src, dst, weight=None) -> "Digraph":
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        if weight is None:
            weight = np.ones(src.size, dtype=np.float64)
        else:
            weight = np.asarray(weight, dtype=np.float64).ravel()
            if weight.shape != src.shape:
                raise ValueError("weight must match src/dst length")
        if n_vertices < 0:
            raise ValueError("n_vertices must be nonnegative")
        if src.size:
            if src.min() < 0 or dst.min() < 0:
                raise ValueError("vertex ids must be nonnegative")
            if src.max() >= n_vertices or dst.max() >= n_vertices:
                raise ValueError("vertex id out of range")
        if not np.all(np.isfinite(weight)):
            raise ValueError("edge weights must be finite")
        if np.any(weight < 0):
            raise ValueError("edge weights must be nonnegative")

        loops = src == dst
        n_loops = int(loops.sum())
        if n_loops:
            warnings.warn(f"dropped {n_loops} self-loop record(s)", stacklevel=2)
            src, dst, weight = src[~loops], dst[~loops], weight[~loops]

        if src.size:
            # Sum duplicate ordered pairs.
            key = src * np.int64(n_vertices) + dst
            order = np.argsort(key, kind="stable")
            key, src, dst, weight = key[order], src[order], dst[order], weight[order]
            first = np.ones(key.size, dtype=bool)
            first[1:] = key[1:] != key[:-1]
            idx = np.flatnonzero(first)
            weight = np.add.reduceat(weight, idx)
            src, dst = src[idx], dst[idx]
            keep = weight > 0
            src, dst, weight = src[keep], dst[keep], weight[keep]

        return cls(
            n_vertices=int(n_vertices),
            src=src,
            dst=dst,
            weight=weight,
            dropped_self_loops=n_loops,
        )

    @classmethod
    def from_dense(cls, M) -> "Digraph":
        M = np.asarray(M, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("adjacency matrix must be square")
        src, dst = np.nonzero(M)
        return cls.from_edges(M.shape[0], src, dst, M[src, dst])

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    def to_sparse_adjacency(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.weight, (self.src, self.dst)),
            shape=(self.n_vertices, self.n_vertices),
        )

    def to_dense_adjacency(self) -> np.ndarray:
        M = np.zeros((self.n_vertices, self.n_vertices))
        M[self.src, self.dst] = self.weight
        return M

    def reversed(self) -> "Digraph":
        return Digraph(self.n_vertices, self.dst, self.src, self.weight,
                       self.dropped_self_loops)

    def scaled(self, factor: float) -> "Digraph":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return Digraph(self.n_vertices, self.src, self.dst,
                       self.weight * factor, self.dropped_self_loops)


@dataclass(frozen=True)
class HermitianOperator:
    """N x N complex Hermitian matrix, dense ndarray or sparse CSR."""

    dim: int
    data: object  # np.ndarray or scipy.sparse matrix

    def __post_init__(self):
        if sp.issparse(self.data):
            if self.data.shape != (self.dim, self.dim):
                raise ValueError("operator shape mismatch")
        else:
            arr = np.asarray(self.data)
            if arr.shape != (self.dim, self.dim):
                raise ValueError("operator shape mismatch")

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.data)

    def to_dense(self) -> np.ndarray:
        if self.is_sparse:
            return np.asarray(self.data.todense())
        return np.asarray(self.data)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.data @ x

    def hermiticity_defect(self) -> float:
        if self.is_sparse:
            d = self.data - self.data.conjugate().T
            return float(abs(d).max()) if d.nnz else 0.0
        arr = np.asarray(self.data)
        if arr.size == 0:
            return 0.0
        return float(np.abs(arr - arr.conj().T).max())


@dataclass(frozen=True)
class RandomWalkOperator:
    """Row-normalized operator D^{-1} A, stored via its Hermitian similar
    D^{-1/2} A D^{-1/2} so the real-symmetric eigensolver applies."""

    dim: int
    sym: HermitianOperator
    d_inv_sqrt: np.ndarray
    degrees: np.ndarray

    def to_dense(self) -> np.ndarray:
        d_inv = np.where(self.degrees > 0, 1.0 / np.where(self.degrees > 0, self.degrees, 1.0), 0.0)
        # recover A = D^{1/2} (sym) D^{1/2}, then scale rows by 1/D
        d_sqrt = np.where(self.degrees > 0, np.sqrt(self.degrees), 0.0)
        A = self.sym.to_dense() * d_sqrt[:, None] * d_sqrt[None, :]
        return A * d_inv[:, None]

    def matvec(self, x: np.ndarray) -> np.ndarray:
        d_inv = np.where(self.degrees > 0, 1.0 / np.where(self.degrees > 0, self.degrees, 1.0), 0.0)
        d_sqrt = np.where(self.degrees > 0, np.sqrt(self.degrees), 0.0)
        return d_inv * (d_sqrt * self.sym.matvec(d_sqrt * x))


@dataclass(frozen=True)
class DegreeVector:
    values: np.ndarray


def _storage(n: int, storage: str) -> str:
    if storage == "auto":
        return "dense" if n <= DENSE_LIMIT else "sparse"
    if storage not in ("dense", "sparse"):
        raise ValueError(f"unknown storage {storage!r}")
    return storage


def skew_part(g: Digraph, storage: str = "auto"):
    """Real skew-symmetric S = M - M^T with A = i*S."""
    mode = _storage(g.n_vertices, storage)
    if mode == "dense":
        M = g.to_dense_adjacency()
        return M - M.T
    M = g.to_sparse_adjacency()
    return (M - M.T).tocsr()


def build_hermitian(g: Digraph, storage: str = "auto") -> HermitianOperator:
    """A(u,v) = (w(u->v) - w(v->u)) * i; Hermitian, purely imaginary."""
    S = skew_part(g, storage)
    if sp.issparse(S):
        data = S.astype(np.complex128) * 1j
    else:
        data = 1j * S
    return HermitianOperator(dim=g.n_vertices, data=data)


def absolute_degrees(A: HermitianOperator) -> DegreeVector:
    """D_jj = sum_l |A_jl| (complex modulus)."""
    if A.is_sparse:
        vals = np.asarray(abs(A.data).sum(axis=1)).ravel()
    else:
        vals = np.abs(A.to_dense()).sum(axis=1)
    return DegreeVector(values=np.asarray(vals, dtype=np.float64))


def _inv_pow(d: np.ndarray, power: float) -> np.ndarray:
    # Zero-degree entries act as 0 (no regularization).
    safe = np.where(d > 0, d, 1.0)
    return np.where(d > 0, safe ** (-power), 0.0)


def normalize_rw(A: HermitianOperator, D: DegreeVector) -> RandomWalkOperator:
    """A_rw = D^{-1} A; zero-degree rows stay zero."""
    d = np.asarray(D.values, dtype=np.float64)
    if d.shape != (A.dim,):
        raise ValueError("degree vector length mismatch")
    d_inv_sqrt = _inv_pow(d, 0.5)
    return RandomWalkOperator(
        dim=A.dim,
        sym=normalize_sym(A, D),
        d_inv_sqrt=d_inv_sqrt,
        degrees=d,
    )


def normalize_sym(A: HermitianOperator, D: DegreeVector) -> HermitianOperator:
    """A_sym = D^{-1/2} A D^{-1/2}; zero-degree rows/cols stay zero."""
    d = np.asarray(D.values, dtype=np.float64)
    if d.shape != (A.dim,):
        raise ValueError("degree vector length mismatch")
    s = _inv_pow(d, 0.5)
    if A.is_sparse:
        Ds = sp.diags(s)
        data = (Ds @ A.data @ Ds).tocsr()
    else:
        data = A.to_dense() * s[:, None] * s[None, :]
    return HermitianOperator(dim=A.dim, data=data)


def symmetrize_naive(g: Digraph, storage: str = "auto"):
    """S = M + M^T, the direction-blind symmetrization."""
    mode = _storage(g.n_vertices, storage)
    if mode == "dense":
        M = g.to_dense_adjacency()
        return M + M.T
    M = g.to_sparse_adjacency()
    return (M + M.T).tocsr()


def cocluster_products(g: Digraph, storage: str = "auto"):
    """(M^T M, M M^T, M^T M + M M^T): common parents, common offspring, both."""
    mode = _storage(g.n_vertices, storage)
    if mode == "dense":
        M = g.to_dense_adjacency()
        left = M.T @ M
        right = M @ M.T
    else:
        M = g.to_sparse_adjacency()
        left = (M.T @ M).tocsr()
        right = (M @ M.T).tocsr()
    return left, right, left + right


def net_flow_transform(M) -> Digraph:
    """Pairwise flow fractions Mt_jl = M_jl / (M_jl + M_lj), 0/0 -> 0.

    The returned digraph carries Mt as edge weights, so the Hermitian build
    realizes Mt - Mt^T.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("net flow transform requires a square matrix")
    if np.any(M < 0):
        raise ValueError("net flow transform requires nonnegative entries")
    total = M + M.T
    with np.errstate(invalid="ignore", divide="ignore"):
        Mt = np.where(total > 0, M / np.where(total > 0, total, 1.0), 0.0)
    np.fill_diagonal(Mt, 0.0)
    return Digraph.from_dense(Mt)


def cap_entries(M, cap: float) -> np.ndarray:
    """Entrywise min(M, cap)."""
    M = np.asarray(M, dtype=np.float64)
    if not cap > 0:
        raise ValueError("cap must be positive")
    return np.minimum(M, cap)


def read_edge_list(path, n_vertices: int | None = None) -> Digraph:
    """Parse `src dst [weight]` lines; `#` starts a comment, weight defaults to 1."""
    src, dst, weight = [], [], []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ValueError(f"{path}:{lineno}: expected 'src dst [weight]'")
            try:
                u, v = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            src.append(u)
            dst.append(v)
            weight.append(w)
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    weight = np.asarray(weight, dtype=np.float64)
    if n_vertices is None:
        n_vertices = int(max(src.max(initial=-1), dst.max(initial=-1)) + 1)
    return Digraph.from_edges(n_vertices, src, dst, weight)


def write_edge_list(g: Digraph, path) -> None:
    with open(path, "w") as fh:
        for u, v, w in zip(g.src, g.dst, g.weight):
            if w == 1.0:
                fh.write(f"{u} {v}\n")
            else:
                fh.write(f"{u} {v} {float(w)!r}\n")


def read_dense_csv(path) -> np.ndarray:
    """Square numeric CSV; row j, column l holds M_jl."""
    M = np.loadtxt(path, delimiter=",", ndmin=2)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{path}: matrix is {M.shape[0]}x{M.shape[1]}, expected square")
    return M
