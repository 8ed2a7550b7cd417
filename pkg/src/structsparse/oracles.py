"""Slow, independent reference solvers used to validate the fast kernels.

Everything here is test-surface machinery: dense linear algebra, ADMM
projections, gradient projection with line search and long-run
subgradient descent.  Oracles either converge to their stated tolerance
or raise; they never fall back silently.  None of them touch the
fixed-point prox path they are used to check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .sets import ConstraintSet, project_simple
from .solver import RegressionProblem, lasso_objective, lipschitz_constant


class OracleError(RuntimeError):
    """An oracle failed to converge within its budget."""


@dataclass
class OracleConfig:
    step_count: int = 5000
    tol: float = 1e-9
    max_iter: int = 100000
    grid_resolution: float = 1e-4

    def __post_init__(self):
        if min(self.step_count, self.max_iter) <= 0 or min(self.tol, self.grid_resolution) <= 0:
            raise ValueError("oracle configuration fields must be positive")


class ConstraintProjector:
    """Euclidean projection onto {lambda >= 0 : A lambda in S} by ADMM.

    Consensus splitting over the two copies (identity and edge map);
    the linear solve is a cached dense Cholesky factor, fine at desk
    scale.  Dual variables persist across calls, so repeated
    projections of nearby points are cheap.
    """

    def __init__(self, constraint: ConstraintSet, sigma: float = 1.0):
        self.constraint = constraint
        self.sigma = sigma
        n, k = constraint.n, constraint.k
        A = constraint.edge_map.toarray()
        self._A = A
        gram = np.eye(n) * (1.0 + sigma) + sigma * (A.T @ A)
        self._chol = scipy.linalg.cho_factor(gram)
        self._x2 = np.zeros(n)
        self._u = np.zeros(k)
        self._w1 = np.zeros(n)
        self._w2 = np.zeros(k)

    def project(self, z: np.ndarray, tol: float = 1e-10, max_iter: int = 100000) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        A, sig = self._A, self.sigma
        x2, u, w1, w2 = self._x2, self._u, self._w1, self._w2
        x = z.copy()
        # absolute residual target scaled to the point, else far points stall
        tol = tol * max(1.0, float(np.linalg.norm(z)))
        for _ in range(max_iter):
            rhs = z + sig * (x2 - w1) + sig * (A.T @ (u - w2))
            x = scipy.linalg.cho_solve(self._chol, rhs)
            ax = A @ x
            x2_prev, u_prev = x2, u
            x2 = np.maximum(x + w1, 0.0)
            u = project_simple(self.constraint.simple_set, ax + w2)
            w1 += x - x2
            w2 += ax - u
            primal = max(np.max(np.abs(x - x2), initial=0.0),
                         np.max(np.abs(ax - u), initial=0.0))
            # the primal residual alone is blind to moving splits; require
            # the dual residual (scaled change of the split variables) too
            dual = sig * max(np.max(np.abs(x2 - x2_prev), initial=0.0),
                             np.max(np.abs(A.T @ (u - u_prev)), initial=0.0))
            if max(primal, dual) <= tol:
                self._x2, self._u, self._w1, self._w2 = x2, u, w1, w2
                return x2
        raise OracleError(f"constraint projection did not reach {tol} in {max_iter} iterations")


def _gamma_lambda_value(beta: np.ndarray, lam: np.ndarray, eps: float = 1e-12) -> float:
    """0.5 * sum(beta^2/(lam+eps) + lam), the scale part of the penalty."""
    return 0.5 * float(np.sum(beta * beta / (lam + eps) + lam))


def _gradient_projection(fun, grad, x0: np.ndarray, projector: ConstraintProjector,
                         max_iter: int, tol: float) -> tuple[np.ndarray, float]:
    """Projected gradient with Armijo backtracking on the projection arc."""
    x = projector.project(x0)
    f = fun(x)
    step = 1.0
    for _ in range(max_iter):
        g = grad(x)
        improved = False
        s = step
        for _ in range(60):
            x_try = projector.project(x - s * g)
            f_try = fun(x_try)
            if f_try <= f - 1e-4 / s * np.sum((x_try - x) ** 2):
                improved = True
                break
            s *= 0.5
        if not improved:
            break
        moved = np.linalg.norm(x_try - x)
        x, f_old, f = x_try, f, f_try
        step = min(s * 2.0, 1e4)
        if abs(f_old - f) <= tol * max(abs(f_old), 1.0) and moved <= np.sqrt(tol) * max(np.linalg.norm(x), 1.0):
            break
    return x, f


def prox_oracle(alpha: np.ndarray, mu: np.ndarray, rho: float,
                constraint: ConstraintSet,
                config: OracleConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Reference prox of rho * Gamma at (alpha, mu) over the constraint set.

    Multi-start projected gradient on the reduced problem in lambda; the
    regression block follows from the closed-form update.  Desk scale
    only (dense projections).
    """
    config = config or OracleConfig()
    alpha = np.asarray(alpha, dtype=float)
    mu = np.asarray(mu, dtype=float)
    n = constraint.n
    if alpha.shape != (n,) or mu.shape != (n,):
        raise ValueError("dimension mismatch")
    projector = ConstraintProjector(constraint)

    def fun(lam):
        return 0.5 * float(np.sum((lam - mu) ** 2)) \
            + rho * 0.5 * float(np.sum(alpha * alpha / (lam + rho) + lam))

    def grad(lam):
        return (lam - mu) + rho * 0.5 * (1.0 - alpha * alpha / (lam + rho) ** 2)

    starts = [mu.copy(), np.abs(alpha), np.ones(n)]
    results = [_gradient_projection(fun, grad, x0, projector,
                                    config.step_count, config.tol)
               for x0 in starts]
    values = [f for _, f in results]
    best_lam, best_f = min(results, key=lambda r: r[1])
    if max(values) - best_f > 1e-5 * max(abs(best_f), 1.0):
        raise OracleError("prox oracle multi-start disagreement")
    lam = best_lam
    beta = alpha * lam / (lam + rho)
    return beta, lam


def omega_value(beta: np.ndarray, constraint: ConstraintSet,
                config: OracleConfig | None = None) -> float:
    """Approximate infimum of the coupled penalty over the constraint set.

    Upper bound within roughly config.tol; always >= ||beta||_1 up to
    the smoothing bias, since the infimum itself is.
    """
    config = config or OracleConfig()
    beta = np.asarray(beta, dtype=float)
    projector = ConstraintProjector(constraint)
    eps = 1e-12

    def fun(lam):
        return _gamma_lambda_value(beta, lam, eps)

    def grad(lam):
        return 0.5 * (1.0 - beta * beta / (lam + eps) ** 2)

    best = np.inf
    for x0 in (np.abs(beta) + 1e-8, np.ones(constraint.n)):
        _, f = _gradient_projection(fun, grad, x0, projector,
                                    config.step_count, config.tol)
        best = min(best, f)
    if not np.isfinite(best):
        raise OracleError("omega oracle failed to find a finite value")
    return best


def full_problem_oracle(problem: RegressionProblem, constraint: ConstraintSet,
                        config: OracleConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Reference solve of the full problem by block alternation.

    Exact ridge-like beta-update with diagonal scale weights, alternated
    with a gradient-projection lambda-update.  Test use only; raises on
    non-convergence.
    """
    config = config or OracleConfig()
    X, y, rho = problem.X, problem.y, problem.rho
    n = problem.n
    if constraint.n != n:
        raise ValueError("constraint dimension mismatch")
    projector = ConstraintProjector(constraint)
    gram = X.T @ X
    xty = X.T @ y
    eps = 1e-12
    lam = projector.project(np.ones(n))
    beta = np.zeros(n)
    f_prev = np.inf
    for sweep in range(config.step_count):
        beta = np.linalg.solve(gram + rho * np.diag(1.0 / (lam + eps)), xty)

        def fun(la, beta=beta):
            return rho * _gamma_lambda_value(beta, la, eps)

        def grad(la, beta=beta):
            return rho * 0.5 * (1.0 - beta * beta / (la + eps) ** 2)

        lam, _ = _gradient_projection(fun, grad, lam, projector,
                                      config.max_iter // config.step_count + 50,
                                      config.tol)
        f = 0.5 * float(np.sum((X @ beta - y) ** 2)) + rho * _gamma_lambda_value(beta, lam, eps)
        if abs(f_prev - f) <= config.tol * max(abs(f_prev), 1.0) and sweep >= 2:
            return _exact_support(gram, xty, rho, beta, lam)
        f_prev = f
    raise OracleError("full-problem oracle did not converge within its sweep budget")


def _exact_support(gram, xty, rho, beta, lam, zero_tol: float = 1e-9):
    """Zero the dead scales and re-solve the ridge system on the live support.

    The smoothed alternation leaves residual mass of order eps on
    components whose scale has collapsed; the thresholded solution has
    exact zeros there, matching the sparsity-containment convention.
    """
    lam = lam.copy()
    lam[lam <= zero_tol * max(float(lam.max(initial=0.0)), 1.0)] = 0.0
    support = lam > 0.0
    beta = np.zeros_like(beta)
    if np.any(support):
        sub = np.ix_(support, support)
        beta[support] = np.linalg.solve(
            gram[sub] + rho * np.diag(1.0 / lam[support]), xty[support])
    return beta, lam


def lasso_subgradient_oracle(problem: RegressionProblem,
                             rounds: int = 40,
                             steps_per_round: int = 400) -> np.ndarray:
    """Long-run subgradient descent for the Lasso, adaptive Polyak steps.

    Target levels shrink geometrically across rounds; returns the best
    iterate seen.  Slow but entirely independent of the proximal path.
    """
    X, y, rho = problem.X, problem.y, problem.rho
    beta = np.zeros(problem.n)
    best = beta.copy()
    f_best = lasso_objective(problem, beta)
    delta = max(f_best, 1.0)
    for _ in range(rounds):
        delta *= 0.6
        for _ in range(steps_per_round):
            r = X @ beta - y
            g = X.T @ r + rho * np.sign(beta)
            gg = float(g @ g)
            if gg == 0.0:
                return beta
            f = lasso_objective(problem, beta)
            if f < f_best:
                f_best, best = f, beta.copy()
            step = (f - (f_best - delta)) / gg
            beta = beta - max(step, 0.0) * g
    return best
