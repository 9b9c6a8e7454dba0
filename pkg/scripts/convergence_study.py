"""Convergence behavior of the walk estimator on the unit disk.

Two experiments:
  1. statistical error vs sample count (expected 1/sqrt(n) decay),
  2. walk length vs stopping shell and contraction factor (expected additive
     step cost per epsilon decade, decreasing in r).

Usage: python scripts/convergence_study.py [--seed 3]
"""

import argparse

import numpy as np

from dirichlet_mc import Ball, Coordinate, WalkParams, estimate_point
from dirichlet_mc.walk import run_walk_block


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    dom = Ball([0.0, 0.0], 1.0)
    v = [0.3, 0.0]

    print("error vs sample count (f = x0, exact value 0.3)")
    print(f"{'n':>8} {'mean':>10} {'stderr':>10} {'|error|':>10}")
    for n in (1_000, 4_000, 16_000, 64_000, 256_000):
        est = estimate_point(dom, Coordinate(0), v, WalkParams(), n, args.seed)
        print(f"{n:>8} {est.mean:>10.5f} {est.stderr:>10.5f} {abs(est.mean - 0.3):>10.5f}")

    print()
    print("median walk length per (r, epsilon); 4000 walks from the center")
    eps_values = (1e-2, 1e-3, 1e-4, 1e-5)
    print(f"{'r':>5} " + " ".join(f"{eps:>9.0e}" for eps in eps_values))
    for r in (0.3, 0.5, 0.7, 0.9):
        row = []
        for eps in eps_values:
            _, steps, _, _ = run_walk_block([0.0, 0.0], dom, WalkParams(r=r, epsilon=eps), args.seed, 0, 4_000)
            row.append(float(np.median(steps)))
        print(f"{r:>5.1f} " + " ".join(f"{m:>9.0f}" for m in row))


if __name__ == "__main__":
    main()
