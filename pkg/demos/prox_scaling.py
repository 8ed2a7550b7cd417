"""Watch the prox computation scale across 2D grid sizes.

The inner fixed-point iteration costs O(n + k) per step and its
iteration count stays flat as the grid grows, so total prox time grows
roughly linearly with the number of variables.

Run:  python3 demos/prox_scaling.py
"""

import numpy as np

import structsparse as ss
from structsparse.experiments import prox_benchmark


def main():
    print(f"{'n':>6} {'side':>5} {'mean iters':>11} {'mean ms':>9}")
    for side in (16, 32, 64, 96):
        n = side * side
        constraint = ss.grid_constraint_2d(side, side, alpha=1.0)
        iters, ms, _ = prox_benchmark(constraint, rho=0.25, repetitions=5,
                                      rng=np.random.default_rng(n))
        print(f"{n:>6} {side:>5} {iters:>11.1f} {ms:>9.2f}")


if __name__ == "__main__":
    main()
