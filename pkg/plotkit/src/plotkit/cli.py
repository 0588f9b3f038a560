"""plotkit command line: sweep and toppairs charts from hermclust CSVs."""

from __future__ import annotations

import argparse
import sys

from .charts import FigureSpec, SchemaError, plot_sweep, plot_toppairs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render hermclust CSV artifacts as charts")
    subs = parser.add_subparsers(dest="command", required=True)

    sw = subs.add_parser("sweep", help="line chart from a sweep aggregate CSV")
    sw.add_argument("csv")
    sw.add_argument("--out", "-o", required=True)
    sw.add_argument("--format", default=None, choices=("png", "pdf", "svg"))
    sw.add_argument("--title", default=None)

    tp = subs.add_parser("toppairs", help="bar chart from a pair-scores CSV")
    tp.add_argument("csv")
    tp.add_argument("--out", "-o", required=True)
    tp.add_argument("--format", default=None, choices=("png", "pdf", "svg"))
    tp.add_argument("--score", default="ci_vol",
                    choices=("ci", "ci_size", "ci_vol"))
    tp.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format or (args.out.rsplit(".", 1)[-1]
                          if "." in args.out else "png")
    if fmt not in ("png", "pdf", "svg"):
        fmt = "png"
    spec = FigureSpec(csv_path=args.csv,
                      kind="lines" if args.command == "sweep" else "bars",
                      out_path=args.out, fmt=fmt, title=args.title,
                      score=getattr(args, "score", "ci_vol"))
    try:
        if args.command == "sweep":
            plot_sweep(args.csv, spec)
        else:
            plot_toppairs(args.csv, spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
