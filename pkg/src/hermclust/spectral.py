"""Eigendecomposition of Hermitian operators and spectral embeddings.

The complex Hermitian eigenproblem is solved through the 2N x 2N real
symmetric embedding [[Re A, -Im A], [Im A, Re A]], whose spectrum is the
doubled spectrum of A: if v = x + iy is an eigenvector of A with eigenvalue
lam, then [x; y] and [-y; x] are embedding eigenvectors with the same
eigenvalue. A complex Gram-Schmidt pass removes the doubling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import HermitianOperator, RandomWalkOperator

HERMITICITY_TOL = 1e-10
# Iterative backend kicks in for top-m queries above this size under "auto".
ITERATIVE_MIN = 1024
_V0_SEED = 0x5EED


class UnpairedSpectrumError(ValueError):
    """Selection is not closed under the +/- eigenvalue pairing."""


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray  # complex128, unit 2-norm


@dataclass(frozen=True)
class SpectralEmbedding:
    features: np.ndarray  # real (N, d)
    n_pairs: int
    provenance: str


def _real_embedding(op: HermitianOperator, sparse: bool):
    if op.is_sparse:
        data = op.data.tocsr()
        re = data.real
        im = data.imag
        emb = sp.bmat([[re, -im], [im, re]], format="csr")
        return emb if sparse else np.asarray(emb.todense())
    A = op.to_dense()
    re = np.ascontiguousarray(A.real)
    im = np.ascontiguousarray(A.imag)
    emb = np.block([[re, -im], [im, re]])
    return sp.csr_matrix(emb) if sparse else emb


def _dedup_complex(values: np.ndarray, vectors: np.ndarray, n: int):
    """Collapse the doubled embedding spectrum to complex eigenpairs.

    Candidates are processed in ascending eigenvalue order; each real vector
    [x; y] converts to x + iy and is kept only if it is not already spanned
    by the accepted complex vectors (the J-partner of an accepted vector
    converts to the same complex line).
    """
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    max_accept = min(n, vectors.shape[1])
    acc = np.empty((n, max_accept), dtype=np.complex128)
    acc_vals = np.empty(max_accept)
    m = 0
    for j in range(vectors.shape[1]):
        c = vectors[:n, j] + 1j * vectors[n:, j]
        if m:
            coeff = acc[:, :m].conj().T @ c
            c = c - acc[:, :m] @ coeff
        nrm = np.linalg.norm(c)
        if nrm > 1e-6:
            acc[:, m] = c / nrm
            acc_vals[m] = values[j]
            m += 1
            if m == max_accept:
                break
    return acc_vals[:m], acc[:, :m]


def _magnitude_order(values: np.ndarray) -> np.ndarray:
    return np.lexsort((-values, -np.abs(values)))


def _as_pairs(values: np.ndarray, vectors: np.ndarray) -> list[EigenPair]:
    order = _magnitude_order(values)
    return [EigenPair(float(values[j]), vectors[:, j].copy()) for j in order]


def _validate_hermitian(op: HermitianOperator) -> None:
    defect = op.hermiticity_defect()
    if defect > HERMITICITY_TOL:
        raise ValueError(f"operator is not Hermitian (max asymmetry {defect:.3e})")


def _iterative_v0(dim: int) -> np.ndarray:
    return np.random.default_rng(_V0_SEED).standard_normal(dim)


def eig_hermitian(op: HermitianOperator, top_m: int | None = None,
                  backend: str = "auto") -> list[EigenPair]:
    """Eigenpairs of a Hermitian operator, sorted by |lambda| descending.

    `top_m` limits the result to the largest magnitudes (iterative path);
    the dense path always computes the full spectrum first.
    """
    if isinstance(op, RandomWalkOperator):
        raise TypeError("use eig_random_walk for the row-normalized operator")
    _validate_hermitian(op)
    n = op.dim
    if n == 0:
        return []
    if top_m is not None and not 1 <= top_m <= n:
        raise ValueError("top_m must be in [1, dim]")

    if backend == "auto":
        use_iter = top_m is not None and (op.is_sparse or n > ITERATIVE_MIN)
    elif backend == "dense":
        use_iter = False
    elif backend == "iterative":
        use_iter = top_m is not None
    else:
        raise ValueError(f"unknown backend {backend!r}")

    if use_iter:
        pairs = _eig_iterative(op, top_m)
        if pairs is not None:
            return pairs
    if op.is_sparse and n > 4 * ITERATIVE_MIN and top_m is None:
        raise ValueError(
            "full spectrum of a large sparse operator requested; pass top_m")

    emb = _real_embedding(op, sparse=False)
    w, v = np.linalg.eigh(emb)
    values, vectors = _dedup_complex(w, v, n)
    if values.size != n:
        raise RuntimeError("eigenpair deduplication lost directions")
    pairs = _as_pairs(values, vectors)
    return pairs[:top_m] if top_m is not None else pairs


def _eig_iterative(op: HermitianOperator, top_m: int) -> list[EigenPair] | None:
    n = op.dim
    # Doubled spectrum: each complex pair appears twice; ask for slack so
    # boundary ties survive deduplication.
    k_req = 2 * top_m + 8
    if k_req >= 2 * n - 1 or n < 8:
        return None
    emb = _real_embedding(op, sparse=True)
    try:
        w, v = spla.eigsh(emb, k=k_req, which="LM", v0=_iterative_v0(2 * n),
                          maxiter=20000)
    except (spla.ArpackNoConvergence, spla.ArpackError):
        return None
    values, vectors = _dedup_complex(w, v, n)
    pairs = _as_pairs(values, vectors)
    return pairs[:top_m]


def eig_random_walk(op: RandomWalkOperator, top_m: int | None = None,
                    backend: str = "auto") -> list[EigenPair]:
    """Eigenpairs of D^{-1} A via its Hermitian similar D^{-1/2} A D^{-1/2}.

    Eigenvalues coincide; eigenvectors are the D^{-1/2}-scaled ones,
    renormalized. Vectors supported on zero-degree vertices are kept as-is
    (those rows of D^{-1} A are zero, so they already are eigenvectors).
    """
    sym_pairs = eig_hermitian(op.sym, top_m=top_m, backend=backend)
    out = []
    for pair in sym_pairs:
        vec = op.d_inv_sqrt * pair.vector
        nrm = np.linalg.norm(vec)
        if nrm > 1e-12:
            vec = vec / nrm
        else:
            vec = pair.vector
        out.append(EigenPair(pair.value, vec))
    return out


def select_pairs(pairs: list[EigenPair], epsilon: float | None = None,
                 ell: int | None = None) -> list[EigenPair]:
    """Keep eigenpairs by magnitude threshold or fixed count.

    The fixed rule extends past ell to every pair whose magnitude ties the
    ell-th one, which keeps +/- pairs and degenerate eigenspaces together.
    """
    if (epsilon is None) == (ell is None):
        raise ValueError("exactly one of epsilon or ell must be given")
    mags = np.array([abs(p.value) for p in pairs])
    if epsilon is not None:
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        return [p for p, m in zip(pairs, mags) if m > epsilon]
    if not 0 <= ell <= len(pairs):
        raise ValueError(f"ell={ell} out of range for {len(pairs)} pairs")
    if ell == 0:
        return []
    boundary = mags[ell - 1]
    tol = 1e-9 * max(1.0, mags[0] if mags.size else 1.0)
    cut = ell
    while cut < len(pairs) and mags[cut] >= boundary - tol:
        cut += 1
    return list(pairs[:cut])


def default_epsilon(p_hat: float, n: int, k: int | None = None,
                    appendix: bool = False) -> float:
    """Magnitude threshold for eigenpair selection.

    Main rule: 10 * sqrt(p*n*log(p*n)). The appendix variant
    20 * sqrt(p*k*n*log n) needs the cluster count.
    """
    if appendix:
        if k is None:
            raise ValueError("appendix variant requires k")
        if n <= 1:
            raise ValueError("appendix variant requires n > 1")
        if p_hat <= 0:
            raise ValueError("p_hat must be positive")
        return 20.0 * float(np.sqrt(p_hat * k * n * np.log(n)))
    x = p_hat * n
    if x <= 1:
        raise ValueError("p_hat * n must exceed 1 (log nonpositive)")
    return 10.0 * float(np.sqrt(x * np.log(x)))


def _check_paired(pairs: list[EigenPair]) -> None:
    values = np.array([p.value for p in pairs])
    scale = np.abs(values).max() if values.size else 0.0
    tol = 1e-8 * max(1.0, scale)
    pos = np.sort(values[values > tol])
    neg = np.sort(-values[values < -tol])
    if pos.size != neg.size or (pos.size and np.abs(pos - neg).max() > tol):
        raise UnpairedSpectrumError("unpaired spectrum: selection is not "
                                    "closed under +/- eigenvalue pairing")


def projection_embedding(pairs: list[EigenPair], mode: str = "factor",
                         dim: int | None = None,
                         provenance: str = "") -> SpectralEmbedding:
    """Rows of P = sum g g* as k-means features.

    Factor mode returns the orthonormal factor U with P = U U^T (same
    pairwise row distances as P itself); full mode materializes P.
    """
    if mode not in ("factor", "full"):
        raise ValueError(f"unknown mode {mode!r}")
    if not pairs:
        if dim is None:
            raise ValueError("dim required for an empty selection")
        feats = np.zeros((dim, dim if mode == "full" else 0))
        return SpectralEmbedding(feats, 0, provenance or f"empty;mode={mode}")
    _check_paired(pairs)
    n = pairs[0].vector.size
    W = np.empty((n, 2 * len(pairs)))
    for j, p in enumerate(pairs):
        W[:, 2 * j] = p.vector.real
        W[:, 2 * j + 1] = p.vector.imag
    # Realness guard: sum Im(g g*) = Y X^T - X Y^T should vanish for a
    # paired selection; probe it instead of materializing the N x N residue.
    X = W[:, 0::2]
    Y = W[:, 1::2]
    probe_rng = np.random.default_rng(_V0_SEED)
    for _ in range(3):
        z = probe_rng.standard_normal(n)
        z /= np.linalg.norm(z)
        residue = Y @ (X.T @ z) - X @ (Y.T @ z)
        if np.linalg.norm(residue) > 1e-8 * max(1.0, len(pairs)):
            raise UnpairedSpectrumError(
                "unpaired spectrum: projection has imaginary residue")
    U, s, _ = np.linalg.svd(W, full_matrices=False)
    U = np.ascontiguousarray(U[:, s > 0.5])
    if U.shape[1] != len(pairs):
        raise UnpairedSpectrumError(
            f"projection rank {U.shape[1]} != selected pairs {len(pairs)}")
    feats = U @ U.T if mode == "full" else U
    return SpectralEmbedding(feats, len(pairs),
                             provenance or f"pairs={len(pairs)};mode={mode}")


def eigvec_embedding(pairs: list[EigenPair],
                     provenance: str = "") -> SpectralEmbedding:
    """Realified eigenvectors [Re g_1, Im g_1, Re g_2, ...] as features."""
    if not pairs:
        raise ValueError("eigvec embedding needs at least one pair")
    n = pairs[0].vector.size
    feats = np.empty((n, 2 * len(pairs)))
    for j, p in enumerate(pairs):
        feats[:, 2 * j] = p.vector.real
        feats[:, 2 * j + 1] = p.vector.imag
    return SpectralEmbedding(feats, len(pairs),
                             provenance or f"eigvec;pairs={len(pairs)}")


def spectral_norm(op: HermitianOperator, backend: str = "auto") -> float:
    """Largest |eigenvalue|."""
    if op.dim == 0:
        return 0.0
    pairs = eig_hermitian(op, top_m=1, backend=backend)
    return abs(pairs[0].value)


def topk_real_symmetric(mat, m: int, backend: str = "auto"):
    """Top-m eigenpairs by magnitude of a real symmetric matrix.

    Returns (values, vectors) with vectors in columns, magnitude-sorted.
    """
    n = mat.shape[0]
    if not 1 <= m <= n:
        raise ValueError("m out of range")
    sym_defect = abs(mat - mat.T).max() if not sp.issparse(mat) else abs(mat - mat.T).max()
    if sym_defect > HERMITICITY_TOL * max(1.0, abs(mat).max() if not sp.issparse(mat) else abs(mat).max()):
        raise ValueError("matrix is not symmetric")
    use_iter = backend == "iterative" or (
        backend == "auto" and (sp.issparse(mat) or n > ITERATIVE_MIN))
    if use_iter and m < n - 1 and n >= 8:
        try:
            w, v = spla.eigsh(mat, k=min(m + 4, n - 2), which="LM",
                              v0=_iterative_v0(n), maxiter=20000)
            order = _magnitude_order(w)[:m]
            return w[order], v[:, order]
        except (spla.ArpackNoConvergence, spla.ArpackError):
            pass
    dense = np.asarray(mat.todense()) if sp.issparse(mat) else np.asarray(mat)
    w, v = np.linalg.eigh(dense)
    order = _magnitude_order(w)[:m]
    return w[order], v[:, order]
