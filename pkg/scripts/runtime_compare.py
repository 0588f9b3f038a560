#!/usr/bin/env python3
"""Median wall time per method on one sampled sparse DSBM instance."""

import argparse

import numpy as np

from hermclust import (DsbmParams, METHODS, complete_random_F, sample,
                       time_methods)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--p", type=float, default=0.004)
    ap.add_argument("--eta", type=float, default=0.15)
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--methods", default=",".join(METHODS))
    args = ap.parse_args()

    params = DsbmParams(k=args.k, n=args.n, p=args.p, q=args.p,
                        F=complete_random_F(args.k, args.eta, args.seed))
    g = sample(params, args.seed).graph
    print(f"N={g.n_vertices}, edges={g.n_edges}, k={args.k}, p={args.p}")
    rows = time_methods(g, args.methods.split(","), args.k,
                        n_runs=args.runs, seed=args.seed)
    for row in sorted(rows, key=lambda r: r.median_seconds):
        spread = np.ptp(row.times)
        print(f"{row.method:>8}: median {row.median_seconds:7.3f}s "
              f"(spread {spread:.3f}s over {args.runs} runs)")


if __name__ == "__main__":
    main()
