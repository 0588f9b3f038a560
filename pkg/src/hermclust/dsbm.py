"""Directed stochastic block model: sampling and its meta-matrix theory.

The model (k, n, p, q, F) places k*n vertices in k clusters; p and q control
edge existence inside and across clusters, and F the cross-cluster edge
orientation probabilities (F_lj + F_jl = 1). The signed meta matrix
Ft = (2F - 1)*i governs recoverability through its spectral gap and the
row separation of the projection onto its image.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .graph import Digraph, HermitianOperator
from .metrics import Partition

_F_TOL = 1e-12
_RANK_TOL = 1e-10


@dataclass(frozen=True)
class DsbmParams:
    k: int
    n: int
    p: float
    q: float
    F: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.F, dtype=np.float64)
        object.__setattr__(self, "F", F)
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        for name in ("p", "q"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if F.shape != (self.k, self.k):
            raise ValueError("F must be k x k")
        if np.any(F < 0) or np.any(F > 1):
            raise ValueError("F entries must lie in [0, 1]")
        if np.abs(F + F.T - 1.0).max() > _F_TOL:
            raise ValueError("F must satisfy F_lj + F_jl = 1")
        if np.abs(np.diag(F) - 0.5).max() > 0:
            raise ValueError("diagonal of F must be exactly 1/2")

    @property
    def n_vertices(self) -> int:
        return self.k * self.n


@dataclass(frozen=True)
class LabeledGraph:
    graph: Digraph
    truth: Partition


@dataclass(frozen=True)
class MetaSpectrum:
    f_tilde_eigenvalues: np.ndarray
    rho_tilde: float
    theta: float
    rank: int


def cyclic_F(k: int, eta: float) -> np.ndarray:
    """Cycle meta-graph: F_{j,j+1} = 1-eta, F_{j+1,j} = eta, 1/2 elsewhere.

    Written as 1/2 + (1-2 eta)/2 * (C - C^T) with C the cycle adjacency, so
    the degenerate k = 2 cycle (where both directions coincide) cancels to
    the all-1/2 matrix, matching the circulant eigenvalue formula.
    """
    if k < 2:
        raise ValueError("cyclic meta-graph needs k >= 2")
    if not 0.0 <= eta <= 0.5:
        raise ValueError("eta must lie in [0, 1/2]")
    C = np.zeros((k, k))
    for j in range(k):
        C[j, (j + 1) % k] += 1.0
    F = 0.5 + 0.5 * (1.0 - 2.0 * eta) * (C - C.T)
    np.fill_diagonal(F, 0.5)
    return F


def complete_random_F(k: int, eta: float, seed: int) -> np.ndarray:
    """Complete meta-graph with uniformly random edge orientations."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not 0.0 <= eta <= 0.5:
        raise ValueError("eta must lie in [0, 1/2]")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    F = np.full((k, k), 0.5)
    for a in range(k):
        for b in range(a + 1, k):
            if rng.random() < 0.5:
                F[a, b], F[b, a] = 1.0 - eta, eta
            else:
                F[a, b], F[b, a] = eta, 1.0 - eta
    return F


def _pair_streams(seed: int):
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    exist_ss, orient_ss = np.random.SeedSequence(seed).spawn(2)
    exist = np.random.Generator(np.random.Philox(exist_ss))
    orient = np.random.Generator(np.random.Philox(orient_ss))
    return exist, orient


def sample(params: DsbmParams, seed: int) -> LabeledGraph:
    """Draw a graph: one existence draw and one orientation draw per pair.

    Existence and orientation use separate counter-based streams consumed in
    a fixed block order, so the same seed yields coupled graphs across
    different eta (and p/q) values.
    """
    k, n = params.k, params.n
    exist_rng, orient_rng = _pair_streams(seed)
    srcs, dsts = [], []
    for a in range(k):
        for b in range(a, k):
            if a == b:
                iu, ju = np.triu_indices(n, 1)
                iu = iu + a * n
                ju = ju + a * n
                prob = params.p
            else:
                iu, ju = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
                iu = (iu + a * n).ravel()
                ju = (ju + b * n).ravel()
                prob = params.q
            exists = exist_rng.random(iu.size) < prob
            forward = orient_rng.random(iu.size) < params.F[a, b]
            iu, ju, forward = iu[exists], ju[exists], forward[exists]
            srcs.append(np.where(forward, iu, ju))
            dsts.append(np.where(forward, ju, iu))
    src = np.concatenate(srcs) if srcs else np.empty(0, dtype=np.int64)
    dst = np.concatenate(dsts) if dsts else np.empty(0, dtype=np.int64)
    graph = Digraph.from_edges(params.n_vertices, src, dst)
    truth = Partition(labels=np.repeat(np.arange(k, dtype=np.int64), n), k=k)
    return LabeledGraph(graph=graph, truth=truth)


def f_tilde(F) -> np.ndarray:
    """Ft = (2F - 1) * i: Hermitian, purely imaginary, zero diagonal."""
    F = np.asarray(F, dtype=np.float64)
    return 1j * (2.0 * F - 1.0)


def meta_spectrum(F) -> MetaSpectrum:
    Ft = f_tilde(F)
    k = Ft.shape[0]
    values, vectors = np.linalg.eigh(Ft)
    keep = np.abs(values) > _RANK_TOL
    rank = int(keep.sum())
    nonzero = np.abs(values[keep])
    rho = float(nonzero.min()) if rank else 0.0
    V = vectors[:, keep]
    P = V @ V.conj().T
    theta = math.inf
    for j in range(k):
        for l in range(j + 1, k):
            theta = min(theta, float(np.linalg.norm(P[j] - P[l])))
    if not math.isfinite(theta):
        theta = 0.0
    return MetaSpectrum(
        f_tilde_eigenvalues=np.sort(values),
        rho_tilde=rho,
        theta=theta,
        rank=rank,
    )


def expected_adjacency(params: DsbmParams) -> HermitianOperator:
    """E[A]: block-constant, (2F_jl - 1)*i scaled by the edge probability.

    In-cluster blocks vanish (F_jj = 1/2). For p != q the cross blocks scale
    by q, the natural extension of the p = q analysis.
    """
    C = 2.0 * params.F - 1.0
    scale = np.where(np.eye(params.k, dtype=bool), params.p, params.q)
    S = np.kron(scale * C, np.ones((params.n, params.n)))
    np.fill_diagonal(S, 0.0)
    return HermitianOperator(dim=params.n_vertices, data=1j * S)


@dataclass(frozen=True)
class AssumptionReport:
    passed: bool
    margin: float
    rho_tilde: float
    theta: float
    rhs: float
    nondistinguishing: bool


def assumption_check(params: DsbmParams, C: float = 1.0,
                     theta: float | None = None,
                     rho_tilde: float | None = None) -> AssumptionReport:
    """rho_tilde >= C * (k/theta) * sqrt(log(n) / (p*n))."""
    if theta is None or rho_tilde is None:
        spec = meta_spectrum(params.F)
        theta = spec.theta if theta is None else theta
        rho_tilde = spec.rho_tilde if rho_tilde is None else rho_tilde
    if theta <= _F_TOL:
        return AssumptionReport(False, 0.0, rho_tilde, theta, math.inf, True)
    if params.p <= 0 or params.n < 2:
        return AssumptionReport(False, 0.0, rho_tilde, theta, math.inf, False)
    rhs = C * (params.k / theta) * math.sqrt(math.log(params.n) / (params.p * params.n))
    margin = rho_tilde / rhs if rhs > 0 else math.inf
    return AssumptionReport(margin >= 1.0, margin, rho_tilde, theta, rhs, False)


def theorem_bound(k: float, n: float, p: float, rho_tilde: float,
                  theta: float) -> float:
    """k^2 log(n) / (rho^2 theta^2 p) with constant 1.

    Order-of-magnitude diagnostic only; the underlying constants are
    unspecified.
    """
    if rho_tilde <= 0 or theta <= 0 or p <= 0 or n <= 1:
        return math.inf
    return (k ** 2) * math.log(n) / (rho_tilde ** 2 * theta ** 2 * p)


def cyclic_bound(k: float, n: float, p: float, eta: float) -> float:
    """k^4 log(n) / ((1-2 eta)^2 p) with constant 1; diverges at eta >= 1/2."""
    if eta >= 0.5 or p <= 0 or n <= 1:
        return math.inf
    return (k ** 4) * math.log(n) / ((1.0 - 2.0 * eta) ** 2 * p)


def misclassification_bound(params: DsbmParams, theta: float | None = None,
                            rho_tilde: float | None = None) -> float:
    if theta is None or rho_tilde is None:
        spec = meta_spectrum(params.F)
        theta = spec.theta if theta is None else theta
        rho_tilde = spec.rho_tilde if rho_tilde is None else rho_tilde
    return theorem_bound(params.k, params.n, params.p, rho_tilde, theta)


def params_to_json(params: DsbmParams, meta: str = "explicit",
                   eta: float | None = None, seed: int | None = None) -> str:
    doc = {
        "k": params.k,
        "n": params.n,
        "p": params.p,
        "q": params.q,
        "F": [float(x) for x in params.F.ravel()],
        "meta": meta,
        "eta": eta,
        "seed": seed,
    }
    return json.dumps(doc, sort_keys=True)


def params_from_json(text: str) -> tuple[DsbmParams, dict]:
    doc = json.loads(text)
    k = int(doc["k"])
    F = np.asarray(doc["F"], dtype=np.float64).reshape(k, k)
    params = DsbmParams(k=k, n=int(doc["n"]), p=float(doc["p"]),
                        q=float(doc["q"]), F=F)
    meta = {key: doc.get(key) for key in ("meta", "eta", "seed")}
    return params, meta
