"""Figures from hermclust CSV artifacts.

Two input schemas are understood, matching the hermclust CLI outputs:

- sweep aggregate: method, param_name, param_value, mean_ari [, std_ari]
  -> line chart, one series per method, optional std error band;
- pair scores: a, b, ci, ci_size, ci_vol [, method]
  -> bar chart over pair ranks, grouped by method when the column exists.

The mapping from data to geometry is deterministic: the plotted points are
exactly the CSV rows, in file order within each series.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

SWEEP_REQUIRED = ("method", "param_name", "param_value", "mean_ari")
PAIR_REQUIRED = ("a", "b", "ci", "ci_size", "ci_vol")
PAIR_SCORES = ("ci", "ci_size", "ci_vol")


class SchemaError(ValueError):
    """Input CSV does not match a published schema."""


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    kind: str                 # "lines" | "bars"
    out_path: str | None = None
    fmt: str = "png"
    score: str = "ci_vol"     # bars only
    xlabel: str | None = None
    ylabel: str | None = None
    title: str | None = None


def read_rows(path) -> list[dict]:
    """CSV rows with `#` metadata lines skipped."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _require_columns(rows: list[dict], required, path, schema: str) -> None:
    if not rows:
        raise SchemaError(f"{path}: no data rows; expected the {schema} "
                          f"schema with columns {', '.join(required)}")
    missing = [c for c in required if c not in rows[0]]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}; "
                          f"expected the {schema} schema")


def load_sweep(path) -> list[dict]:
    rows = read_rows(path)
    _require_columns(rows, SWEEP_REQUIRED, path, "sweep aggregate")
    out = []
    for row in rows:
        rec = {
            "method": row["method"],
            "param_name": row["param_name"],
            "param_value": float(row["param_value"]),
            "mean_ari": float(row["mean_ari"]),
        }
        if "std_ari" in row and row["std_ari"] not in (None, ""):
            rec["std_ari"] = float(row["std_ari"])
        out.append(rec)
    return out


def load_pairs(path) -> list[dict]:
    rows = read_rows(path)
    _require_columns(rows, PAIR_REQUIRED, path, "pair scores")
    out = []
    for row in rows:
        rec = {"a": int(row["a"]), "b": int(row["b"])}
        for score in PAIR_SCORES:
            rec[score] = float(row[score])
        rec["method"] = row.get("method", "") or ""
        out.append(rec)
    return out


def plot_sweep(path, spec: FigureSpec | None = None):
    """Mean-ARI lines over the swept parameter, one series per method."""
    spec = spec or FigureSpec(csv_path=str(path), kind="lines")
    rows = load_sweep(path)
    has_std = all("std_ari" in r for r in rows)
    if not has_std:
        warnings.warn("std_ari column missing; error band omitted",
                      stacklevel=2)
    fig, ax = plt.subplots(figsize=(6, 4))
    methods = list(dict.fromkeys(r["method"] for r in rows))
    for method in methods:
        series = [r for r in rows if r["method"] == method]
        series.sort(key=lambda r: r["param_value"])
        xs = [r["param_value"] for r in series]
        ys = [r["mean_ari"] for r in series]
        line, = ax.plot(xs, ys, marker="o", label=method)
        if has_std:
            lo = [r["mean_ari"] - r["std_ari"] for r in series]
            hi = [r["mean_ari"] + r["std_ari"] for r in series]
            ax.fill_between(xs, lo, hi, alpha=0.2, color=line.get_color())
    ax.set_xlabel(spec.xlabel or rows[0]["param_name"])
    ax.set_ylabel(spec.ylabel or "mean ARI")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    fig.tight_layout()
    if spec.out_path:
        fig.savefig(spec.out_path, format=spec.fmt)
    return fig


def plot_toppairs(path, spec: FigureSpec | None = None):
    """Score bars over pair ranks, grouped by method when present."""
    spec = spec or FigureSpec(csv_path=str(path), kind="bars")
    if spec.score not in PAIR_SCORES:
        raise SchemaError(f"unknown score {spec.score!r}; "
                          f"one of {', '.join(PAIR_SCORES)}")
    rows = load_pairs(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    methods = list(dict.fromkeys(r["method"] for r in rows))
    n_groups = len(methods)
    width = 0.8 / n_groups
    for g, method in enumerate(methods):
        series = [r for r in rows if r["method"] == method]
        ranks = range(1, len(series) + 1)
        xs = [rank + (g - (n_groups - 1) / 2) * width for rank in ranks]
        ax.bar(xs, [r[spec.score] for r in series], width=width,
               label=method or None)
    longest = max(sum(r["method"] == m for r in rows) for m in methods)
    ax.set_xticks(range(1, longest + 1))
    ax.set_xlabel(spec.xlabel or "pair rank")
    ax.set_ylabel(spec.ylabel or spec.score)
    if spec.title:
        ax.set_title(spec.title)
    if any(methods):
        ax.legend()
    fig.tight_layout()
    if spec.out_path:
        fig.savefig(spec.out_path, format=spec.fmt)
    return fig


def extract_line_points(fig) -> dict:
    """{legend label: [(x, y), ...]} for every plotted line."""
    out = {}
    for ax in fig.get_axes():
        for line in ax.get_lines():
            xs, ys = line.get_data()
            out[line.get_label()] = list(zip(map(float, xs), map(float, ys)))
    return out


def extract_bar_heights(fig) -> dict:
    """{legend label: [height, ...]} for every bar container."""
    out = {}
    for ax in fig.get_axes():
        for container in getattr(ax, "containers", []):
            label = container.get_label() or ""
            out[label] = [float(p.get_height()) for p in container.patches]
    return out
