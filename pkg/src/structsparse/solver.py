"""Accelerated proximal solver for structured-sparsity regression.

The outer loop is a Nesterov-style accelerated proximal gradient on the
squared loss whose prox step (the coupled penalty restricted to the
constraint set) is computed by the averaged fixed-point iteration of
:mod:`structsparse.prox`.  A soft-threshold FISTA Lasso solver with the
same momentum schedule serves as the unconstrained baseline.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .prox import CompositeMap, ProxProblem, beta_from_lambda, picard_opial_fixed_point
from .sets import ConstraintSet


@dataclass(frozen=True)
class RegressionProblem:
    """Least-squares data (X, y) with regularization weight rho."""

    X: np.ndarray
    y: np.ndarray
    rho: float

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ValueError("X must be m x n and y of length m")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]


@dataclass
class SolverConfig:
    kappa: float = 0.2
    inner_tol: float = 1e-2
    outer_tol: float = 1e-8
    max_outer: int = 10000
    max_inner: int = 10000
    lipschitz: float | None = None

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise ValueError("kappa must lie in (0, 1)")
        if self.inner_tol <= 0 or self.outer_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class SolverState:
    """Diagnostics of one solve."""

    beta: np.ndarray
    lam: np.ndarray
    objective_history: list[float] = field(default_factory=list)
    inner_iteration_counts: list[int] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    inner_converged: bool = True
    wall_time_ms: float = 0.0

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "beta": self.beta.tolist(),
            "lambda": self.lam.tolist(),
            "objective_history": self.objective_history,
            "inner_iteration_counts": self.inner_iteration_counts,
            "converged": self.converged,
            "wall_time_ms": self.wall_time_ms,
        }


def lipschitz_constant(X: np.ndarray, method: str = "exact_svd") -> float:
    """Upper bound on the largest eigenvalue of X^T X.

    ``exact_svd`` uses the largest singular value; ``power_iteration``
    runs to a 1e-9 relative change and inflates the estimate by 1%.
    """
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        raise ValueError("X must be nonempty")
    if method == "exact_svd":
        return float(np.linalg.svd(X, compute_uv=False)[0] ** 2)
    if method == "power_iteration":
        rng = np.random.default_rng(0)
        v = rng.standard_normal(X.shape[1])
        v /= np.linalg.norm(v)
        est = 0.0
        for _ in range(1000):
            w = X.T @ (X @ v)
            new_est = float(v @ w)
            nw = np.linalg.norm(w)
            if nw == 0.0:
                return 0.0
            v = w / nw
            if est > 0 and abs(new_est - est) <= 1e-9 * est:
                est = new_est
                break
            est = new_est
        return 1.01 * est
    raise ValueError(f"unknown method {method!r}")


def theta_next(theta: float) -> float:
    """Next momentum scalar: the root in (0, 1) of t^2/theta^2 + t - 1 = 0."""
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    return 0.5 * theta * (np.sqrt(theta * theta + 4.0) - theta)


def gamma_objective(problem: RegressionProblem, beta: np.ndarray, lam: np.ndarray) -> float:
    """Objective 0.5 ||X beta - y||^2 + rho * Gamma(beta, lambda).

    Convention: beta_i^2 / lambda_i is 0 when both vanish and +inf when
    only lambda_i does; +inf is returned as a sentinel, not raised.
    """
    lam = np.asarray(lam, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(lam < 0):
        raise ValueError("lambda must be nonnegative")
    resid = 0.5 * float(np.sum((problem.X @ beta - problem.y) ** 2))
    zero = lam == 0.0
    if np.any(zero & (beta != 0.0)):
        return np.inf
    ratio = np.zeros_like(lam)
    np.divide(beta * beta, lam, out=ratio, where=~zero)
    return resid + problem.rho * 0.5 * float(np.sum(ratio + lam))


def lasso_objective(problem: RegressionProblem, beta: np.ndarray) -> float:
    return 0.5 * float(np.sum((problem.X @ beta - problem.y) ** 2)) \
        + problem.rho * float(np.sum(np.abs(beta)))


def nepio_solve(problem: RegressionProblem,
                constraint: ConstraintSet,
                config: SolverConfig | None = None,
                beta0: np.ndarray | None = None,
                lam0: np.ndarray | None = None) -> SolverState:
    """Accelerated proximal solve of the structured-sparsity problem.

    The u-update equals the prox of (rho/L) * Gamma at the gradient
    point, computed by warm-started Picard-Opial; the w-update applies
    the stabilized momentum combination.  Starts at beta = 0 and the
    all-ones scale vector (feasible for every shipped constraint set)
    unless explicit feasible initial values are given.
    """
    config = config or SolverConfig()
    if constraint.n != problem.n:
        raise ValueError("constraint dimension mismatch with problem")
    X, y, rho = problem.X, problem.y, problem.rho
    n = problem.n
    L = config.lipschitz if config.lipschitz is not None else lipschitz_constant(X)
    tau = rho / L
    composite = CompositeMap(constraint.edge_map)
    c = 1.0 / composite.norm_sq

    beta_u = np.zeros(n) if beta0 is None else np.asarray(beta0, dtype=float).copy()
    lam_u = np.ones(n) if lam0 is None else np.asarray(lam0, dtype=float).copy()
    beta_w, lam_w = beta_u.copy(), lam_u.copy()
    beta_prev, lam_prev = beta_u, lam_u
    theta = 1.0
    v_warm = np.zeros(composite.d)

    state = SolverState(beta=beta_u, lam=lam_u)
    t0 = time.perf_counter()
    f_prev = gamma_objective(problem, beta_u, lam_u)
    for t in range(1, config.max_outer + 1):
        grad = X.T @ (X @ beta_w - y)
        a = beta_w - grad / L
        pp = ProxProblem(a, lam_w, tau, constraint, composite=composite, c=c)
        fp = picard_opial_fixed_point(pp, v0=v_warm, kappa=config.kappa,
                                      tol=config.inner_tol, max_iter=config.max_inner)
        v_warm = fp.v
        state.inner_iteration_counts.append(fp.iteration)
        if not fp.converged:
            state.inner_converged = False
        lam_next = lam_w - c * composite.apply_t(fp.v)
        np.maximum(lam_next, 0.0, out=lam_next)
        beta_next = beta_from_lambda(a, lam_next, tau)

        f = gamma_objective(problem, beta_next, lam_next)
        state.objective_history.append(f)
        theta_n = theta_next(theta)
        pi = 1.0 - theta_n + theta_n / theta
        beta_w = pi * beta_next - (pi - 1.0) * beta_prev
        lam_w = pi * lam_next - (pi - 1.0) * lam_prev
        beta_prev, lam_prev = beta_next, lam_next
        theta = theta_n

        if np.isfinite(f) and abs(f_prev - f) <= config.outer_tol * max(abs(f_prev), 1e-12):
            state.converged = True
            state.iterations = t
            break
        f_prev = f
        state.iterations = t

    state.beta = beta_prev
    state.lam = lam_prev
    state.wall_time_ms = (time.perf_counter() - t0) * 1e3
    return state


def lasso_fista(problem: RegressionProblem,
                config: SolverConfig | None = None) -> SolverState:
    """Accelerated proximal gradient with componentwise soft thresholding.

    Uses the same momentum schedule as the structured solver; stops on
    the relative decrease of the Lasso objective.
    """
    config = config or SolverConfig()
    X, y, rho = problem.X, problem.y, problem.rho
    L = config.lipschitz if config.lipschitz is not None else lipschitz_constant(X)
    thr = rho / L
    beta_u = np.zeros(problem.n)
    beta_w = beta_u.copy()
    beta_prev = beta_u
    theta = 1.0
    state = SolverState(beta=beta_u, lam=np.abs(beta_u))
    t0 = time.perf_counter()
    f_prev = lasso_objective(problem, beta_u)
    for t in range(1, config.max_outer + 1):
        grad = X.T @ (X @ beta_w - y)
        a = beta_w - grad / L
        beta_next = np.sign(a) * np.maximum(np.abs(a) - thr, 0.0)
        f = lasso_objective(problem, beta_next)
        state.objective_history.append(f)
        theta_n = theta_next(theta)
        pi = 1.0 - theta_n + theta_n / theta
        beta_w = pi * beta_next - (pi - 1.0) * beta_prev
        beta_prev = beta_next
        theta = theta_n
        if abs(f_prev - f) <= config.outer_tol * max(abs(f_prev), 1e-12):
            state.converged = True
            state.iterations = t
            break
        f_prev = f
        state.iterations = t
    state.beta = beta_prev
    state.lam = np.abs(beta_prev)
    state.wall_time_ms = (time.perf_counter() - t0) * 1e3
    return state
