#!/usr/bin/env python3
"""Spectrum of the row-normalized Hermitian matrix on a sampled instance:
bulk edge, outlier count, and the outlier magnitudes vs the meta-matrix rank.
"""

import argparse

import numpy as np

from hermclust import (DsbmParams, absolute_degrees, build_hermitian,
                       complete_random_F, cyclic_F, meta_spectrum,
                       normalize_rw, sample, spectrum_report)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--p", type=float, default=0.5)
    ap.add_argument("--eta", type=float, default=0.15)
    ap.add_argument("--meta", default="cyclic", choices=("cyclic", "complete"))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    F = (cyclic_F(args.k, args.eta) if args.meta == "cyclic"
         else complete_random_F(args.k, args.eta, args.seed))
    params = DsbmParams(k=args.k, n=args.n, p=args.p, q=args.p, F=F)
    g = sample(params, args.seed).graph
    A = build_hermitian(g)
    rw = normalize_rw(A, absolute_degrees(A))
    report = spectrum_report(rw, args.k)
    rank = meta_spectrum(F).rank
    print(f"meta-matrix rank: {rank}")
    print(f"outlier count:    {report.outlier_count} (rule {report.rule})")
    print(f"bulk edge:        {report.bulk_edge:.4f}")
    print(f"top magnitudes:   {np.round(report.magnitudes, 4)}")


if __name__ == "__main__":
    main()
