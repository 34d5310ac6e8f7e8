#!/usr/bin/env python3
"""Tabulate the uncertainty bound for the affine-kernel map on M_2.

With W = diag(1, 2), k(x, t) = 1 + x t, T = I, a = sigma_x, b = sigma_y the
commutator term is gamma = sqrt(20) and the product Delta_a(lam) Delta_b(mu)
stays above gamma/2 everywhere; the script writes the product over a
(lam, mu) grid as plot-ready CSV.
"""

import argparse
import csv
import sys

import numpy as np

from nclp.algebra import TracedAlgebra
from nclp.inequalities import uncertainty_check
from nclp.kernels import KernelMap, OnePlusXTKernel


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=41)
    ap.add_argument("--span", type=float, default=3.0)
    ap.add_argument("--output", default="uncertainty_grid.csv")
    args = ap.parse_args()

    alg = TracedAlgebra([2])
    km = KernelMap(alg.diagonal([1.0, 2.0]), OnePlusXTKernel())
    phi = km.as_sesquilinear()
    sigma_x = np.array([0, 1, 1, 0], dtype=complex)
    sigma_y = np.array([0, -1j, 1j, 0], dtype=complex)
    grid = list(np.linspace(-args.span, args.span, args.points))
    reports = uncertainty_check(phi, sigma_x, sigma_y, grid, grid)

    gamma = reports[0].gamma
    worst = min(r.delta_a * r.delta_b for r in reports)
    print(f"gamma = {gamma:.12f} (sqrt(20) = {np.sqrt(20):.12f})")
    print(f"min Delta_a * Delta_b on the grid = {worst:.6f} >= gamma/2 = "
          f"{gamma / 2:.6f}: {worst >= gamma / 2 - 1e-8}")

    with open(args.output, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lam", "mu", "delta_a", "delta_b", "product",
                         "half_gamma", "bound_ok"])
        for r in reports:
            writer.writerow([r.lam, r.mu, r.delta_a, r.delta_b,
                             r.delta_a * r.delta_b, 0.5 * r.gamma, r.bound_ok])
    print(f"wrote {args.output} ({len(reports)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
