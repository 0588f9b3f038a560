"""Method registry and experiment runners: sweeps, concentration, timing."""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from . import dsbm, graph, metrics, spectral
from .graph import Digraph
from .kmeans import kmeans
from .metrics import Partition

METHODS = ("herm", "herm-rw", "herm-sym", "naive", "disg-l", "disg-r",
           "disg-lr", "bi-sym", "dd-sym")


@dataclass(frozen=True)
class MethodOptions:
    selection: str = "fixed"        # "fixed" | "threshold"
    epsilon: float | None = None    # threshold value; estimated when None
    ell: int | None = None          # override for the fixed rule
    embedding_mode: str = "factor"  # "factor" | "full" (herm only)
    tau: float | None = None        # DISG regularizer; mean degree when None
    dd_alpha: float = 0.5           # DD-Sym out-degree exponent
    dd_beta: float = 0.5            # DD-Sym in-degree exponent
    row_normalize: bool = False
    restarts: int = 10
    max_iter: int = 100
    tol: float = 1e-6
    backend: str = "auto"


def _row_normalize(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    return X / safe[:, None]


def _herm_ell(k: int) -> int:
    return k if k % 2 == 0 else k - 1


def _estimate_epsilon(g: Digraph, k: int) -> float:
    # Average existence degree concentrates around p*k*n = p*N.
    n_total = g.n_vertices
    mean_degree = 2.0 * g.weight.sum() / max(n_total, 1)
    p_hat = mean_degree / max(n_total, 1)
    n_per = max(n_total // max(k, 1), 2)
    return spectral.default_epsilon(p_hat, n_per)


def _select_hermitian(pairs, g: Digraph, k: int, options: MethodOptions,
                      default_ell: int):
    if options.selection == "threshold":
        eps = options.epsilon
        if eps is None:
            eps = _estimate_epsilon(g, k)
        return spectral.select_pairs(pairs, epsilon=eps)
    if options.selection != "fixed":
        raise ValueError(f"unknown selection rule {options.selection!r}")
    ell = options.ell if options.ell is not None else default_ell
    ell = min(ell, len(pairs))
    return spectral.select_pairs(pairs, ell=ell)


def _top_m_request(k: int, n: int) -> int | None:
    # Enough pairs for the fixed rule plus tie slack; None means full.
    want = k + 6
    return want if want < n else None


def _disg_normalize(C, tau: float | None):
    if sp.issparse(C):
        d = np.asarray(abs(C).sum(axis=1)).ravel()
    else:
        d = np.abs(C).sum(axis=1)
    t = float(d.mean()) if tau is None else float(tau)
    reg = d + t
    scale = np.where(reg > 0, 1.0 / np.sqrt(np.where(reg > 0, reg, 1.0)), 0.0)
    if sp.issparse(C):
        Ds = sp.diags(scale)
        return (Ds @ C @ Ds).tocsr()
    return C * scale[:, None] * scale[None, :]


def _dd_normalize(g: Digraph, alpha: float, beta: float):
    M = g.to_sparse_adjacency() if g.n_vertices > graph.DENSE_LIMIT \
        else g.to_dense_adjacency()
    if sp.issparse(M):
        dout = np.asarray(M.sum(axis=1)).ravel()
        din = np.asarray(M.sum(axis=0)).ravel()
    else:
        dout = M.sum(axis=1)
        din = M.sum(axis=0)
    so = np.where(dout > 0, np.where(dout > 0, dout, 1.0) ** (-alpha), 0.0)
    si = np.where(din > 0, np.where(din > 0, din, 1.0) ** (-beta), 0.0)
    if sp.issparse(M):
        Mn = sp.diags(so) @ M @ sp.diags(si)
        return (Mn.T @ Mn + Mn @ Mn.T).tocsr()
    Mn = M * so[:, None] * si[None, :]
    return Mn.T @ Mn + Mn @ Mn.T


def method_embedding(name: str, g: Digraph, k: int,
                     options: MethodOptions = MethodOptions()) -> np.ndarray:
    """Real feature matrix consumed by k-means for the given method."""
    if name not in METHODS:
        raise ValueError(f"unknown method {name!r}; valid: {', '.join(METHODS)}")
    n = g.n_vertices
    if k > n:
        raise ValueError(f"k={k} exceeds the number of vertices {n}")
    if k < 1:
        raise ValueError("k must be at least 1")
    # Threshold selection must see every pair above epsilon, so it runs on
    # the full spectrum; the fixed rule only needs the top pairs plus slack.
    top_m = None if options.selection == "threshold" else _top_m_request(k, n)

    if name in ("herm", "herm-rw", "herm-sym"):
        # Low-density graphs go straight to sparse storage so the iterative
        # eigensolver avoids a dense round-trip; operators are identical
        # either way.
        storage = "auto"
        if n > 512 and g.n_edges < 0.05 * n * n:
            storage = "sparse"
        A = graph.build_hermitian(g, storage=storage)
        if name == "herm":
            decompose = lambda m: spectral.eig_hermitian(  # noqa: E731
                A, top_m=m, backend=options.backend)
            default_ell = _herm_ell(k)
        else:
            D = graph.absolute_degrees(A)
            if name == "herm-rw":
                op = graph.normalize_rw(A, D)
                decompose = lambda m: spectral.eig_random_walk(  # noqa: E731
                    op, top_m=m, backend=options.backend)
            else:
                op = graph.normalize_sym(A, D)
                decompose = lambda m: spectral.eig_hermitian(  # noqa: E731
                    op, top_m=m, backend=options.backend)
            default_ell = k
        pairs = decompose(top_m)
        selected = _select_hermitian(pairs, g, k, options, default_ell)
        if top_m is not None and len(selected) == len(pairs) and len(pairs) < n:
            # Tie extension ran off the truncated spectrum (the boundary
            # eigenspace continues past top_m); redo with the full spectrum.
            pairs = decompose(None)
            selected = _select_hermitian(pairs, g, k, options, default_ell)
        if name == "herm":
            X = spectral.projection_embedding(
                selected, mode=options.embedding_mode, dim=n).features
        elif not selected:
            X = np.zeros((n, 0))
        else:
            X = spectral.eigvec_embedding(selected).features
    elif name == "naive":
        S = graph.symmetrize_naive(g)
        _, vectors = spectral.topk_real_symmetric(S, k, backend=options.backend)
        X = vectors
    elif name in ("disg-l", "disg-r", "disg-lr", "bi-sym"):
        left, right, both = graph.cocluster_products(g)
        if name == "bi-sym":
            _, X = spectral.topk_real_symmetric(both, k, backend=options.backend)
        else:
            feats = []
            if name in ("disg-l", "disg-lr"):
                _, v = spectral.topk_real_symmetric(
                    _disg_normalize(left, options.tau), k, backend=options.backend)
                feats.append(v)
            if name in ("disg-r", "disg-lr"):
                _, v = spectral.topk_real_symmetric(
                    _disg_normalize(right, options.tau), k, backend=options.backend)
                feats.append(v)
            X = np.hstack(feats)
    elif name == "dd-sym":
        B = _dd_normalize(g, options.dd_alpha, options.dd_beta)
        _, X = spectral.topk_real_symmetric(B, k, backend=options.backend)
    else:  # pragma: no cover
        raise AssertionError(name)

    X = np.ascontiguousarray(X, dtype=np.float64)
    if options.row_normalize:
        X = _row_normalize(X)
    return X


def run_method(name: str, g: Digraph, k: int, seed: int = 0,
               options: MethodOptions = MethodOptions()) -> Partition:
    X = method_embedding(name, g, k, options)
    result = kmeans(X, k, seed=seed, restarts=options.restarts,
                    max_iter=options.max_iter, tol=options.tol)
    return Partition(labels=result.labels, k=k)


# ---------------------------------------------------------------------------
# Sweeps


@dataclass(frozen=True)
class SweepSpec:
    k: int
    n: int
    p: float
    q: float | None = None           # defaults to p
    eta: float = 0.0
    meta: str = "cyclic"             # "cyclic" | "complete"
    param_name: str = "eta"          # "eta" | "p"
    values: tuple = ()
    methods: tuple = ("herm",)
    seeds: tuple = (0,)
    options: MethodOptions = field(default_factory=MethodOptions)

    def params_at(self, value: float, seed: int) -> dsbm.DsbmParams:
        eta = self.eta
        p = self.p
        q = self.q if self.q is not None else self.p
        if self.param_name == "eta":
            eta = value
        elif self.param_name == "p":
            p = value
            q = value if self.q is None else self.q
        else:
            raise ValueError(f"unknown sweep parameter {self.param_name!r}")
        if self.meta == "cyclic":
            F = dsbm.cyclic_F(self.k, eta)
        elif self.meta == "complete":
            F = dsbm.complete_random_F(self.k, eta, seed)
        else:
            raise ValueError(f"unknown meta-graph {self.meta!r}")
        return dsbm.DsbmParams(k=self.k, n=self.n, p=p, q=q, F=F)


@dataclass(frozen=True)
class SweepRow:
    method: str
    param_name: str
    param_value: float
    seed: int
    ari: float
    misclassified: int
    seconds: float


SWEEP_HEADER = ("method", "param_name", "param_value", "seed", "ari",
                "misclassified", "seconds")
AGGREGATE_HEADER = ("method", "param_name", "param_value", "n_seeds",
                    "mean_ari", "std_ari", "mean_misclassified",
                    "std_misclassified", "mean_seconds")


def _run_cell(spec: SweepSpec, value: float, seed: int,
              done: set) -> list[SweepRow]:
    todo = [m for m in spec.methods if (m, value, seed) not in done]
    if not todo:
        return []
    labeled = dsbm.sample(spec.params_at(value, seed), seed)
    rows = []
    for m in todo:
        start = time.perf_counter()
        pred = run_method(m, labeled.graph, spec.k, seed=seed,
                          options=spec.options)
        elapsed = time.perf_counter() - start
        rows.append(SweepRow(
            method=m,
            param_name=spec.param_name,
            param_value=float(value),
            seed=int(seed),
            ari=metrics.ari(pred, labeled.truth),
            misclassified=metrics.misclassified(pred, labeled.truth),
            seconds=elapsed,
        ))
    return rows


def sweep(spec: SweepSpec, workers: int = 1,
          existing: list[SweepRow] | None = None,
          progress=None) -> list[SweepRow]:
    """Full cross-product of values x seeds x methods.

    Rows already present in `existing` are kept and not recomputed, which
    makes interrupted sweeps restartable.
    """
    rows = []
    done = set()
    for r in existing or ():
        key = (r.method, r.param_value, r.seed)
        if key not in done:
            rows.append(r)
            done.add(key)
    cells = [(float(v), int(s)) for v in spec.values for s in spec.seeds]

    def work(cell):
        value, seed = cell
        out = _run_cell(spec, value, seed, done)
        if progress is not None:
            progress(value, seed, out)
        return out

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for out in pool.map(work, cells):
                rows.extend(out)
    else:
        for cell in cells:
            rows.extend(work(cell))
    rows.sort(key=lambda r: (r.param_value, r.seed, spec.methods.index(r.method)
                             if r.method in spec.methods else -1))
    return rows


def aggregate(rows: list[SweepRow]) -> list[dict]:
    """Per (method, point) mean and standard deviation (ddof=1)."""
    groups: dict[tuple, list[SweepRow]] = {}
    for r in rows:
        groups.setdefault((r.method, r.param_name, r.param_value), []).append(r)
    out = []
    for (method, pname, pvalue), grp in sorted(groups.items(),
                                               key=lambda kv: (kv[0][2], kv[0][0])):
        aris = np.array([r.ari for r in grp])
        mis = np.array([r.misclassified for r in grp], dtype=float)
        secs = np.array([r.seconds for r in grp])
        ddof = 1 if len(grp) > 1 else 0
        out.append({
            "method": method,
            "param_name": pname,
            "param_value": pvalue,
            "n_seeds": len(grp),
            "mean_ari": float(aris.mean()),
            "std_ari": float(aris.std(ddof=ddof)),
            "mean_misclassified": float(mis.mean()),
            "std_misclassified": float(mis.std(ddof=ddof)),
            "mean_seconds": float(secs.mean()),
        })
    return out


def rows_from_csv(path) -> list[SweepRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        for rec in reader:
            rows.append(SweepRow(
                method=rec["method"],
                param_name=rec["param_name"],
                param_value=float(rec["param_value"]),
                seed=int(rec["seed"]),
                ari=float(rec["ari"]),
                misclassified=int(rec["misclassified"]),
                seconds=float(rec["seconds"]),
            ))
    return rows


# ---------------------------------------------------------------------------
# Concentration experiment


@dataclass(frozen=True)
class ConcentrationTrial:
    seed: int
    norm: float
    bound: float
    ratio: float
    passed: bool


@dataclass(frozen=True)
class ConcentrationReport:
    trials: list[ConcentrationTrial]
    bound: float
    max_ratio: float
    all_passed: bool


def concentration_experiment(params: dsbm.DsbmParams,
                             seeds) -> ConcentrationReport:
    """Spectral norm of A - E[A] per seed against 10 sqrt(p k n log n)."""
    expected = dsbm.expected_adjacency(params).to_dense()
    if params.n > 1:
        bound = 10.0 * math.sqrt(
            params.p * params.k * params.n * math.log(params.n))
    else:
        bound = 0.0
    trials = []
    for seed in seeds:
        labeled = dsbm.sample(params, seed)
        A = graph.build_hermitian(labeled.graph, storage="dense").to_dense()
        diff = graph.HermitianOperator(dim=params.n_vertices,
                                       data=A - expected)
        norm = spectral.spectral_norm(diff, backend="iterative")
        ratio = norm / bound if bound > 0 else (0.0 if norm == 0 else math.inf)
        trials.append(ConcentrationTrial(
            seed=int(seed), norm=norm, bound=bound, ratio=ratio,
            passed=norm <= bound or (bound == 0 and norm == 0)))
    max_ratio = max((t.ratio for t in trials), default=0.0)
    return ConcentrationReport(
        trials=trials, bound=bound, max_ratio=max_ratio,
        all_passed=all(t.passed for t in trials))


# ---------------------------------------------------------------------------
# Spectrum reporting


@dataclass(frozen=True)
class SpectrumReport:
    outlier_count: int
    bulk_edge: float
    gap_index: int
    gap_value: float
    magnitudes: np.ndarray
    rule: str


def _operator_magnitudes(op, k: int, backend: str) -> np.ndarray:
    want = min(2 * k + 1, op.dim if hasattr(op, "dim") else op.shape[0])
    if isinstance(op, graph.RandomWalkOperator):
        pairs = spectral.eig_hermitian(op.sym, top_m=want, backend=backend)
        values = np.array([p.value for p in pairs])
    elif isinstance(op, graph.HermitianOperator):
        pairs = spectral.eig_hermitian(op, top_m=want, backend=backend)
        values = np.array([p.value for p in pairs])
    else:  # real symmetric matrix
        values, _ = spectral.topk_real_symmetric(op, want, backend=backend)
    return np.abs(values)


def spectrum_report(op, k: int, rule: str = "relative-gap",
                    backend: str = "auto") -> SpectrumReport:
    """Count spectral outliers against the bulk.

    relative-gap: the boundary is the largest (m_i - m_{i+1}) / m_i over the
    top 2k magnitude gaps. fixed: exactly k outliers, the gap at k reported
    as a separation margin.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    mags = np.sort(_operator_magnitudes(op, k, backend))[::-1]
    if mags.size == 0 or mags[0] <= 1e-12:
        return SpectrumReport(0, float(mags[0]) if mags.size else 0.0,
                              0, 0.0, mags, rule)
    limit = min(2 * k, mags.size - 1)
    if limit < 1:
        return SpectrumReport(0, float(mags[0]), 0, 0.0, mags, rule)
    heads = mags[:limit]
    tails = mags[1:limit + 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        gaps = np.where(heads > 1e-12, (heads - tails) / np.where(heads > 0, heads, 1.0), 0.0)
    if rule == "relative-gap":
        idx = int(np.argmax(gaps))
        count = idx + 1
    elif rule == "fixed":
        count = min(k, limit)
        idx = count - 1
    else:
        raise ValueError(f"unknown outlier rule {rule!r}")
    bulk_edge = float(mags[count]) if count < mags.size else 0.0
    return SpectrumReport(
        outlier_count=count,
        bulk_edge=bulk_edge,
        gap_index=idx + 1,
        gap_value=float(gaps[idx]),
        magnitudes=mags,
        rule=rule,
    )


# ---------------------------------------------------------------------------
# Runtime comparison


@dataclass(frozen=True)
class TimingRow:
    method: str
    median_seconds: float
    times: tuple


def time_methods(g: Digraph, methods, k: int, n_runs: int = 5, seed: int = 0,
                 options: MethodOptions = MethodOptions()) -> list[TimingRow]:
    """Median wall time per method over repeated identical runs."""
    out = []
    for m in methods:
        times = []
        for _ in range(n_runs):
            start = time.perf_counter()
            run_method(m, g, k, seed=seed, options=options)
            times.append(time.perf_counter() - start)
        out.append(TimingRow(method=m,
                             median_seconds=float(np.median(times)),
                             times=tuple(times)))
    return out
