"""Compressive recovery of a piecewise-constant image via its Haar tree.

Haar coefficients of a piecewise-constant image are sparse and their
support is (approximately) rooted at the coarse scales: a detail
coefficient is large only if its parent is.  Encoding that as a
parent-dominates-child cone on the scale vector beats an unstructured
Lasso at the same measurement budget.

Run:  python3 demos/wavelet_tree_recovery.py
"""

import numpy as np

import structsparse as ss
from structsparse import haar
from structsparse.experiments import default_rho_grid, model_error


def main():
    rng = np.random.default_rng(3)
    side = 16
    beta_star, _ = haar.haar_tree_setup(side, rng)
    sparsity = int(np.sum(np.abs(beta_star) > 1e-10))
    m = 3 * sparsity
    n = side * side
    print(f"{side}x{side} image, {sparsity} nonzero coefficients, m={m} measurements")

    X = rng.standard_normal((m, n))
    clean = X @ beta_star
    noise_std = float(np.linalg.norm(clean) / np.sqrt(m) * 10 ** (-20 / 20.0))
    y = clean + noise_std * rng.standard_normal(m)

    rhos = default_rho_grid(X, y)[2:6]
    config = ss.SolverConfig(max_outer=1500)

    best_lasso = min(
        model_error(ss.lasso_fista(ss.RegressionProblem(X, y, rho), config).beta,
                    beta_star) for rho in rhos)
    print(f"lasso        best model error: {best_lasso:.4f}")

    constraint = ss.tree_constraint(haar.quadtree_parents(side))
    best_tree = min(
        model_error(ss.nepio_solve(ss.RegressionProblem(X, y, rho),
                                   constraint, config).beta, beta_star)
        for rho in rhos)
    print(f"tree-coupled best model error: {best_tree:.4f}")


if __name__ == "__main__":
    main()
