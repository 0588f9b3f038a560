#!/usr/bin/env python3
"""Desk-scale recovery sweep: mean ARI vs eta, one series per method.

Reproduces the shape of the synthetic-recovery figures (cyclic or complete
meta-graph) at a size that runs in minutes. Writes the per-seed CSV and the
aggregate CSV consumed by plotkit.
"""

import argparse

from hermclust.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--p", type=float, default=0.05)
    ap.add_argument("--meta", default="cyclic", choices=("cyclic", "complete"))
    ap.add_argument("--etas", default="0,0.05,0.1,0.15,0.2,0.25,0.3")
    ap.add_argument("--methods",
                    default="herm,herm-rw,naive,disg-lr,bi-sym,dd-sym")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="recovery_sweep.csv")
    args = ap.parse_args()

    return cli_main([
        "sweep",
        "--meta", args.meta,
        "--k", str(args.k), "--n", str(args.n), "--p", str(args.p),
        "--param", "eta", "--values", args.etas,
        "--methods", args.methods,
        "--seeds", str(args.seeds),
        "--workers", str(args.workers),
        "--out", args.out,
    ])


if __name__ == "__main__":
    raise SystemExit(main())
