"""Command-line entry point: generate, cluster, evaluate, sweep, topk,
spectrum, concentration."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__, dsbm, graph, metrics, pipelines
from .metrics import Partition
from .pipelines import (AGGREGATE_HEADER, METHODS, SWEEP_HEADER,
                        MethodOptions, SweepSpec)


class UsageError(Exception):
    """Bad arguments or inputs; exits with status 2."""


def _config_hash(config: dict) -> str:
    text = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required option(s): "
                         + ", ".join("--" + n.replace("_", "-") for n in missing))


def _metadata(config: dict) -> dict:
    return {
        "tool_version": __version__,
        "config_hash": _config_hash(config),
        "seed": config.get("seed"),
        "config": dict(config),
    }


def _open_out(path):
    if path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _write_csv(path, header, rows, config: dict) -> None:
    meta = _metadata(config)
    fh, should_close = _open_out(path)
    try:
        for key, value in meta.items():
            if key == "config":
                value = json.dumps(value, sort_keys=True, default=str)
            fh.write(f"# {key}={value}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(row[col]) for col in header) + "\n")
    finally:
        if should_close:
            fh.close()


def _write_json(path, payload: dict, config: dict) -> None:
    doc = {"metadata": _metadata(config), **payload}
    fh, should_close = _open_out(path)
    try:
        json.dump(doc, fh, indent=2, default=str)
        fh.write("\n")
    finally:
        if should_close:
            fh.close()


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_config_defaults(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        for key, value in doc.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr) and getattr(args, attr) is None:
                setattr(args, attr, value)
    return args


def _effective_config(args: argparse.Namespace) -> dict:
    skip = {"func", "config"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _build_params(args) -> tuple[dsbm.DsbmParams, dict]:
    meta = args.meta or "cyclic"
    eta = args.eta if args.eta is not None else 0.0
    q = args.q if args.q is not None else args.p
    seed = args.seed if args.seed is not None else 0
    if meta == "cyclic":
        F = dsbm.cyclic_F(args.k, eta)
    elif meta == "complete":
        F = dsbm.complete_random_F(args.k, eta, seed)
    elif meta == "explicit":
        if not args.f_json:
            raise UsageError("explicit meta-graph requires --f-json")
        F = np.asarray(json.loads(Path(args.f_json).read_text()),
                       dtype=float).reshape(args.k, args.k)
    else:
        raise UsageError(f"unknown meta-graph {meta!r}")
    try:
        params = dsbm.DsbmParams(k=args.k, n=args.n, p=args.p, q=q, F=F)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return params, {"meta": meta, "eta": eta, "seed": seed}


def _method_options(args) -> MethodOptions:
    kwargs = {}
    for name in ("selection", "epsilon", "ell", "tau", "row_normalize",
                 "restarts", "max_iter", "tol", "backend", "dd_alpha",
                 "dd_beta"):
        value = getattr(args, name, None)
        if value is not None:
            kwargs[name] = value
    return MethodOptions(**kwargs)


def _read_labels(path) -> np.ndarray:
    try:
        labels = [int(line.split("#", 1)[0]) for line in Path(path).read_text().splitlines()
                  if line.split("#", 1)[0].strip()]
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read labels from {path}: {exc}") from None
    return np.asarray(labels, dtype=np.int64)


def _load_graph(args) -> graph.Digraph:
    fmt = getattr(args, "input_format", None) or "edges"
    try:
        if fmt == "edges":
            return graph.read_edge_list(args.graph)
        if fmt == "matrix":
            M = graph.read_dense_csv(args.graph)
            cap = getattr(args, "cap", None)
            if cap is not None:
                M = graph.cap_entries(M, cap)
            if getattr(args, "net_flow", False):
                return graph.net_flow_transform(M)
            return graph.Digraph.from_dense(M)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot load graph: {exc}") from None
    raise UsageError(f"unknown input format {fmt!r}")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_generate(args) -> int:
    args = _load_config_defaults(args)
    _require(args, "k", "n", "p")
    if args.seed is None:
        args.seed = 0
    params, meta = _build_params(args)
    labeled = dsbm.sample(params, args.seed)
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    edges_path = Path(str(prefix) + ".edges")
    labels_path = Path(str(prefix) + ".labels")
    graph.write_edge_list(labeled.graph, edges_path)
    labels_path.write_text(
        "".join(f"{c}\n" for c in labeled.truth.labels))
    config = _effective_config(args)
    _write_json(str(prefix) + ".meta.json", {
        "params": json.loads(dsbm.params_to_json(params, **meta)),
        "n_vertices": labeled.graph.n_vertices,
        "n_edges": labeled.graph.n_edges,
        "edges_file": str(edges_path),
        "labels_file": str(labels_path),
    }, config)
    _progress(f"wrote {edges_path} ({labeled.graph.n_edges} edges) and {labels_path}")
    return 0


def cmd_cluster(args) -> int:
    args = _load_config_defaults(args)
    _require(args, "graph", "method", "k")
    if args.seed is None:
        args.seed = 0
    g = _load_graph(args)
    if args.k > g.n_vertices:
        raise UsageError(f"k={args.k} exceeds number of vertices {g.n_vertices}")
    options = _method_options(args)
    try:
        pred = pipelines.run_method(args.method, g, args.k, seed=args.seed,
                                    options=options)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("".join(f"{c}\n" for c in pred.labels))
    config = _effective_config(args)
    _write_json(str(out) + ".meta.json", {
        "method": args.method,
        "k": args.k,
        "n_vertices": g.n_vertices,
        "partition_file": str(out),
    }, config)
    _progress(f"wrote partition to {out}")
    return 0


def cmd_evaluate(args) -> int:
    args = _load_config_defaults(args)
    config = _effective_config(args)
    payload = {}
    if args.pred and args.truth:
        pred_labels = _read_labels(args.pred)
        truth_labels = _read_labels(args.truth)
        if pred_labels.size != truth_labels.size:
            raise UsageError("prediction and truth have different lengths")
        pred = Partition.from_labels(pred_labels)
        truth = Partition.from_labels(truth_labels)
        payload["ari"] = metrics.ari(pred, truth)
        if pred.k == truth.k:
            payload["misclassified"] = metrics.misclassified(pred, truth)
    if args.graph and args.pred:
        g = _load_graph(args)
        labels = _read_labels(args.pred)
        if labels.size != g.n_vertices:
            raise UsageError("partition length does not match the graph")
        part = Partition.from_labels(labels)
        pairs = metrics.top_pairs(g, part, score=args.score or "ci_size")
        payload["pairs"] = [asdict(p) for p in pairs]
        payload["ci_matrix"] = [[float(x) for x in row]
                                for row in metrics.ci_matrix(g, part)]
    if not payload:
        raise UsageError("evaluate needs --pred with --truth and/or --graph")
    fmt = args.format or "json"
    out = args.out or "-"
    if fmt == "json":
        _write_json(out, payload, config)
    elif fmt == "csv":
        if "pairs" in payload:
            _write_csv(out, ("a", "b", "ci", "ci_size", "ci_vol"),
                       [{"a": p["cluster_a"], "b": p["cluster_b"],
                         "ci": p["ci"], "ci_size": p["ci_size"],
                         "ci_vol": p["ci_vol"]} for p in payload["pairs"]],
                       config)
            if out != "-":
                # square numeric CSV, same format the matrix reader ingests
                np.savetxt(str(out) + ".ci_matrix.csv",
                           np.asarray(payload["ci_matrix"]), delimiter=",")
        else:
            header = tuple(k for k in ("ari", "misclassified") if k in payload)
            _write_csv(out, header, [payload], config)
    else:
        raise UsageError(f"unknown format {fmt!r}")
    return 0


def cmd_sweep(args) -> int:
    args = _load_config_defaults(args)
    _require(args, "k", "n", "p")
    if args.seed is None:
        args.seed = 0
    if not args.values:
        raise UsageError("sweep requires --values")
    if isinstance(args.values, str):
        args.values = _float_list(args.values)
    methods = tuple((args.methods or "herm").split(","))
    for m in methods:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r}; valid: {', '.join(METHODS)}")
    n_seeds = args.seeds if args.seeds is not None else 1
    seeds = tuple(range(args.seed, args.seed + n_seeds))
    spec = SweepSpec(
        k=args.k, n=args.n, p=args.p, q=args.q,
        eta=args.eta if args.eta is not None else 0.0,
        meta=args.meta or "cyclic",
        param_name=args.param or "eta",
        values=tuple(args.values),
        methods=methods,
        seeds=seeds,
        options=_method_options(args),
    )
    existing = []
    out_path = Path(args.out)
    if args.resume and out_path.exists():
        existing = pipelines.rows_from_csv(out_path)
        _progress(f"resuming: {len(existing)} rows already on disk")
    config = _effective_config(args)

    # Completed cells accumulate here so an interrupted sweep still flushes.
    collected = list(existing)

    def report(value, seed, rows):
        collected.extend(rows)
        _progress(f"point {spec.param_name}={value} seed={seed}: "
                  f"{len(rows)} row(s)")

    rows = collected
    try:
        rows = pipelines.sweep(spec, workers=args.workers or 1,
                               existing=existing, progress=report)
    finally:
        if rows is collected and len(collected) > len(existing):
            _progress("flushing partial sweep results")
        row_dicts = [asdict(r) for r in rows]
        _write_csv(str(out_path), SWEEP_HEADER, row_dicts, config)
        agg = pipelines.aggregate(rows)
        agg_path = args.aggregate_out or str(
            out_path.with_name(out_path.stem + "_agg.csv"))
        _write_csv(agg_path, AGGREGATE_HEADER, agg, config)
        if (args.format or "csv") == "json":
            _write_json(str(out_path) + ".json", {"rows": row_dicts}, config)
            _write_json(str(agg_path) + ".json", {"rows": agg}, config)
        _progress(f"wrote {len(rows)} rows to {out_path} and aggregate to {agg_path}")
    return 0


def cmd_topk(args) -> int:
    args = _load_config_defaults(args)
    _require(args, "graph", "partition")
    g = _load_graph(args)
    labels = _read_labels(args.partition)
    if labels.size != g.n_vertices:
        raise UsageError("partition length does not match the graph")
    part = Partition.from_labels(labels)
    score = args.score or "ci_size"
    try:
        pairs = metrics.top_pairs(g, part, score=score, m=args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    config = _effective_config(args)
    rows = [{"a": p.cluster_a, "b": p.cluster_b, "ci": p.ci,
             "ci_size": p.ci_size, "ci_vol": p.ci_vol} for p in pairs]
    if (args.format or "csv") == "json":
        _write_json(args.out or "-", {"pairs": rows}, config)
    else:
        _write_csv(args.out or "-", ("a", "b", "ci", "ci_size", "ci_vol"),
                   rows, config)
    return 0


def cmd_spectrum(args) -> int:
    args = _load_config_defaults(args)
    _require(args, "graph", "k")
    g = _load_graph(args)
    A = graph.build_hermitian(g)
    op = args.operator or "a-rw"
    if op == "a":
        target = A
    elif op == "a-rw":
        target = graph.normalize_rw(A, graph.absolute_degrees(A))
    elif op == "a-sym":
        target = graph.normalize_sym(A, graph.absolute_degrees(A))
    elif op == "naive":
        target = graph.symmetrize_naive(g)
    elif op == "bi-sym":
        target = graph.cocluster_products(g)[2]
    else:
        raise UsageError(f"unknown operator {op!r}")
    report = pipelines.spectrum_report(target, args.k,
                                       rule=args.rule or "relative-gap")
    config = _effective_config(args)
    _write_json(args.out or "-", {
        "operator": op,
        "outlier_count": report.outlier_count,
        "bulk_edge": report.bulk_edge,
        "gap_index": report.gap_index,
        "gap_value": report.gap_value,
        "magnitudes": [float(x) for x in report.magnitudes],
        "rule": report.rule,
    }, config)
    return 0


def cmd_concentration(args) -> int:
    args = _load_config_defaults(args)
    _require(args, "k", "n", "p")
    if args.seed is None:
        args.seed = 0
    params, _ = _build_params(args)
    n_seeds = args.seeds if args.seeds is not None else 10
    report = pipelines.concentration_experiment(
        params, range(args.seed, args.seed + n_seeds))
    config = _effective_config(args)
    payload = {
        "bound": report.bound,
        "max_ratio": report.max_ratio,
        "all_passed": report.all_passed,
        "trials": [asdict(t) for t in report.trials],
    }
    if (args.format or "json") == "csv":
        _write_csv(args.out or "-", ("seed", "norm", "bound", "ratio", "passed"),
                   payload["trials"], config)
    else:
        _write_json(args.out or "-", payload, config)
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_common(sub, *, seed=True, out_required=False):
    sub.add_argument("--config", help="JSON config; explicit flags win")
    if seed:
        sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--out", "-o", required=out_required, default=None,
                     help="output path ('-' for stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default=None)
    sub.add_argument("--workers", type=int, default=None)


def _add_model(sub):
    sub.add_argument("--k", type=int, default=None)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--p", type=float, default=None)
    sub.add_argument("--q", type=float, default=None)
    sub.add_argument("--eta", type=float, default=None)
    sub.add_argument("--meta", choices=("cyclic", "complete", "explicit"),
                     default=None)
    sub.add_argument("--f-json", default=None,
                     help="k x k orientation matrix as JSON (explicit meta)")


def _add_method_options(sub):
    sub.add_argument("--selection", choices=("fixed", "threshold"), default=None)
    sub.add_argument("--epsilon", type=float, default=None)
    sub.add_argument("--ell", type=int, default=None)
    sub.add_argument("--tau", type=float, default=None)
    sub.add_argument("--dd-alpha", dest="dd_alpha", type=float, default=None)
    sub.add_argument("--dd-beta", dest="dd_beta", type=float, default=None)
    sub.add_argument("--row-normalize", dest="row_normalize",
                     action="store_const", const=True, default=None)
    sub.add_argument("--restarts", type=int, default=None)
    sub.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    sub.add_argument("--tol", type=float, default=None)
    sub.add_argument("--backend", choices=("auto", "dense", "iterative"),
                     default=None)


def _add_graph_input(sub):
    sub.add_argument("--graph", default=None, help="edge list or matrix CSV")
    sub.add_argument("--input-format", dest="input_format",
                     choices=("edges", "matrix"), default=None)
    sub.add_argument("--cap", type=float, default=None,
                     help="cap matrix entries before any transform")
    sub.add_argument("--net-flow", dest="net_flow", action="store_const",
                     const=True, default=None,
                     help="apply the pairwise flow-fraction transform")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hermclust",
        description="Spectral clustering of directed graphs via Hermitian "
                    "adjacency matrices")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("generate", help="sample a DSBM graph to disk")
    _add_common(gen, out_required=True)
    _add_model(gen)
    gen.set_defaults(func=cmd_generate)

    clu = subs.add_parser("cluster", help="cluster a graph file")
    _add_common(clu, out_required=True)
    _add_graph_input(clu)
    clu.add_argument("--method", choices=METHODS, default=None)
    clu.add_argument("--k", type=int, default=None)
    _add_method_options(clu)
    clu.set_defaults(func=cmd_cluster)

    ev = subs.add_parser("evaluate", help="score a partition")
    _add_common(ev)
    _add_graph_input(ev)
    ev.add_argument("--pred", default=None)
    ev.add_argument("--truth", default=None)
    ev.add_argument("--score", choices=("ci", "ci_size", "ci_vol"), default=None)
    ev.set_defaults(func=cmd_evaluate)

    sw = subs.add_parser("sweep", help="parameter sweep over DSBM graphs")
    _add_common(sw, out_required=True)
    _add_model(sw)
    sw.add_argument("--param", choices=("eta", "p"), default=None)
    sw.add_argument("--values", type=_float_list, default=None)
    sw.add_argument("--methods", default=None,
                    help="comma-separated method names")
    sw.add_argument("--seeds", type=int, default=None,
                    help="number of seeds starting at --seed")
    sw.add_argument("--aggregate-out", dest="aggregate_out", default=None)
    sw.add_argument("--resume", action="store_true")
    _add_method_options(sw)
    sw.set_defaults(func=cmd_sweep)

    tk = subs.add_parser("topk", help="rank cluster pairs by cut imbalance")
    _add_common(tk, seed=False)
    _add_graph_input(tk)
    tk.add_argument("--partition", default=None)
    tk.add_argument("--score", choices=("ci", "ci_size", "ci_vol"), default=None)
    tk.add_argument("-m", type=int, default=None)
    tk.set_defaults(func=cmd_topk)

    spc = subs.add_parser("spectrum", help="outlier report for an operator")
    _add_common(spc, seed=False)
    _add_graph_input(spc)
    spc.add_argument("--operator", choices=("a", "a-rw", "a-sym", "naive",
                                            "bi-sym"), default=None)
    spc.add_argument("--k", type=int, default=None)
    spc.add_argument("--rule", choices=("relative-gap", "fixed"), default=None)
    spc.set_defaults(func=cmd_spectrum)

    con = subs.add_parser("concentration",
                          help="spectral-norm concentration experiment")
    _add_common(con)
    _add_model(con)
    con.add_argument("--seeds", type=int, default=None)
    con.set_defaults(func=cmd_concentration)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
