"""Proximity operator of the coupled penalty over a constraint set.

The prox of rho * Gamma at (alpha, mu), restricted to lambda in the
constraint set, is reduced to a problem in lambda alone and solved as
the prox of a linearly composed function through the stacked map
B^T = [I, A^T].  A fixed point of the nonexpansive map

    H(v) = (I - prox_{phi/c})((I - c B B^T) v + B mu)

recovers lambda = mu - c B^T v; averaged (Opial) Picard iteration makes
the fixed point computable.  The scalar building block is the minimizer
of h(s) = (s - mu)^2 + r (alpha^2 / (s + rho) + s) over s >= 0, obtained
from the largest real root of a cubic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sets import ConstraintSet, EdgeMap, project_simple


@dataclass(frozen=True)
class CompositeMap:
    """The stacked map B with B^T = [I, A^T]; B v = (v, A v)."""

    edge_map: EdgeMap
    norm_sq: float = field(init=False)

    def __post_init__(self):
        # ||B||^2 = 1 + ||A||^2; the edge-map estimate is already inflated
        object.__setattr__(self, "norm_sq", 1.0 + self.edge_map.norm_sq_est())

    @property
    def n(self) -> int:
        return self.edge_map.n

    @property
    def d(self) -> int:
        return self.edge_map.n + self.edge_map.k

    def apply(self, w: np.ndarray) -> np.ndarray:
        return np.concatenate([w, self.edge_map.matvec(w)])

    def apply_t(self, v: np.ndarray) -> np.ndarray:
        n = self.n
        return v[:n] + self.edge_map.rmatvec(v[n:])


def _largest_cubic_root(b: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Largest real root of x^3 + b x^2 + d for d <= 0, vectorized.

    Closed-form (trigonometric / Cardano branches) followed by two
    Newton steps; safeguarded bisection on the bracket
    [max(0, -b), max(0, -b) + max(1, |d|^(1/3))] for any element whose
    residual survives the polish.
    """
    b = np.asarray(b, dtype=float)
    d = np.asarray(d, dtype=float)
    p = -b * b / 3.0
    q = d + 2.0 * b**3 / 27.0
    disc = -(4.0 * p**3 + 27.0 * q * q)

    y = np.empty_like(b)
    three_real = (disc >= 0.0) & (p < 0.0)
    if np.any(three_real):
        pp = p[three_real]
        qq = q[three_real]
        m = 2.0 * np.sqrt(-pp / 3.0)
        arg = np.clip(3.0 * qq / (pp * m), -1.0, 1.0)
        y[three_real] = m * np.cos(np.arccos(arg) / 3.0)
    one_real = ~three_real
    if np.any(one_real):
        pp = p[one_real]
        qq = q[one_real]
        s = np.sqrt(np.maximum(qq * qq / 4.0 + pp**3 / 27.0, 0.0))
        y[one_real] = np.cbrt(-qq / 2.0 + s) + np.cbrt(-qq / 2.0 - s)

    x = y - b / 3.0
    lo = np.maximum(0.0, -b)
    hi = lo + np.maximum(1.0, np.cbrt(np.abs(d)))
    x = np.clip(x, lo, hi)
    for _ in range(2):
        f = x * x * (x + b) + d
        fp = x * (3.0 * x + 2.0 * b)
        step = np.where(fp > 0.0, f / np.where(fp > 0.0, fp, 1.0), 0.0)
        x = np.clip(x - step, lo, hi)

    scale = 1.0 + np.abs(b) * x * x + np.abs(d)
    bad = np.abs(x * x * (x + b) + d) > 1e-10 * scale
    if np.any(bad):
        xlo, xhi = lo[bad].copy(), hi[bad].copy()
        bb, dd = b[bad], d[bad]
        for _ in range(100):
            mid = 0.5 * (xlo + xhi)
            pos = mid * mid * (mid + bb) + dd > 0.0
            xhi = np.where(pos, mid, xhi)
            xlo = np.where(pos, xlo, mid)
        x[bad] = 0.5 * (xlo + xhi)
    return x


def cubic_prox_vec(mu: np.ndarray, alpha: np.ndarray, r: float, rho: float) -> np.ndarray:
    """Componentwise minimizer of (s - mu_i)^2 + r (alpha_i^2/(s+rho) + s), s >= 0."""
    if r <= 0 or rho <= 0:
        raise ValueError("r and rho must be positive")
    mu = np.asarray(mu, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    # monic form of 2 x^3 + (r - 2(mu+rho)) x^2 - r alpha^2
    b = (r - 2.0 * (mu + rho)) / 2.0
    d = -r * alpha * alpha / 2.0
    x0 = _largest_cubic_root(np.broadcast_to(b, mu.shape).copy(),
                             np.broadcast_to(d, mu.shape).copy())
    return np.maximum(x0 - rho, 0.0)


def cubic_prox_scalar(mu: float, alpha: float, r: float, rho: float) -> float:
    """Scalar version of :func:`cubic_prox_vec`."""
    return float(cubic_prox_vec(np.array([mu]), np.array([alpha]), r, rho)[0])


def beta_from_lambda(alpha: np.ndarray, lam: np.ndarray, rho: float) -> np.ndarray:
    """Optimal regression block given the scales: alpha * lam / (lam + rho).

    Components with a zero scale are exactly zero.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("lambda must be nonnegative")
    return np.asarray(alpha, dtype=float) * lam / (lam + rho)


@dataclass(frozen=True)
class ProxProblem:
    """One prox instance: point (alpha, mu), weight rho, constraint set.

    ``c`` is the fixed-point constant; it must lie in (0, 2/||B||^2] for
    the map H to be nonexpansive.  Default: 1/||B||^2 (estimated).
    """

    alpha: np.ndarray
    mu: np.ndarray
    rho: float
    constraint: ConstraintSet
    composite: CompositeMap = None
    c: float = None

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        n = self.constraint.n
        if np.shape(self.alpha) != (n,) or np.shape(self.mu) != (n,):
            raise ValueError("alpha/mu dimension mismatch with constraint set")
        if self.composite is None:
            object.__setattr__(self, "composite", CompositeMap(self.constraint.edge_map))
        if self.c is None:
            object.__setattr__(self, "c", 1.0 / self.composite.norm_sq)
        elif not 0.0 < self.c <= 2.0 / self.composite.norm_sq + 1e-12:
            raise ValueError("c outside the nonexpansiveness range (0, 2/||B||^2]")


@dataclass
class FixedPointState:
    """Terminal state of the averaged fixed-point iteration."""

    v: np.ndarray
    iteration: int
    residual: float
    converged: bool


def prox_phi1(s_in: np.ndarray, alpha: np.ndarray, rho: float, r: float) -> np.ndarray:
    """Prox of the smooth-block penalty: componentwise cubic minimizers."""
    return cubic_prox_vec(s_in, alpha, r, rho)


def prox_phi(v: np.ndarray, problem: ProxProblem, r: float) -> np.ndarray:
    """Block-separable prox: cubic block on the first n, projection on the rest."""
    n = problem.constraint.n
    if v.shape != (problem.composite.d,):
        raise ValueError("point dimension mismatch with composite map")
    s = cubic_prox_vec(v[:n], problem.alpha, r, problem.rho)
    t = project_simple(problem.constraint.simple_set, v[n:])
    return np.concatenate([s, t])


def picard_opial_fixed_point(problem: ProxProblem,
                             v0: np.ndarray | None = None,
                             kappa: float = 0.2,
                             tol: float = 1e-2,
                             max_iter: int = 10000,
                             engine: str = "jit") -> FixedPointState:
    """Averaged Picard iteration v <- kappa v + (1 - kappa) H(v).

    Stops when the relative change between consecutive iterates drops
    below ``tol``; if ``max_iter`` is exhausted the state is returned
    flagged as non-converged (the caller decides whether to accept).
    The default engine is the compiled scalar loop; ``engine="numpy"``
    runs the vectorized reference path (same arithmetic, used for
    cross-checking).
    """
    if not 0.0 < kappa < 1.0:
        raise ValueError("kappa must lie in (0, 1)")
    if tol <= 0:
        raise ValueError("tol must be positive")
    B = problem.composite
    c = problem.c
    r = problem.rho / c
    n = problem.constraint.n
    b_mu = B.apply(problem.mu)
    v = np.zeros(B.d) if v0 is None else np.asarray(v0, dtype=float).copy()
    if v.shape != (B.d,):
        raise ValueError("v0 dimension mismatch")
    simple = problem.constraint.simple_set
    alpha = np.asarray(problem.alpha, dtype=float)
    rho = problem.rho
    emap = problem.constraint.edge_map

    if engine == "jit":
        from . import _picard_kernel as pk
        from .sets import L1Ball
        if isinstance(simple, L1Ball):
            set_kind, set_radius = pk.SET_L1BALL, simple.alpha
        else:
            set_kind, set_radius = pk.SET_ORTHANT, 0.0
        it, residual, converged = pk.picard_loop(
            v, emap.pos, emap.neg, b_mu, alpha, rho, r, c, kappa, tol,
            max_iter, set_kind, set_radius)
        return FixedPointState(v, int(it), float(residual), bool(converged))

    one_minus = 1.0 - kappa
    residual = np.inf
    for it in range(1, max_iter + 1):
        bt_v = v[:n] + emap.rmatvec(v[n:])
        z = v - c * np.concatenate([bt_v, emap.matvec(bt_v)]) + b_mu
        h = z.copy()
        h[:n] -= cubic_prox_vec(z[:n], alpha, r, rho)
        h[n:] -= simple.project(z[n:])
        v_new = kappa * v + one_minus * h
        residual = float(np.linalg.norm(v_new - v) / max(np.linalg.norm(v), 1e-12))
        v = v_new
        if residual <= tol:
            return FixedPointState(v, it, residual, True)
    return FixedPointState(v, max_iter, residual, False)


def apply_h(problem: ProxProblem, v: np.ndarray) -> np.ndarray:
    """One evaluation of the fixed-point map H (no averaging)."""
    B = problem.composite
    z = v - problem.c * B.apply(B.apply_t(v)) + B.apply(problem.mu)
    return z - prox_phi(z, problem, problem.rho / problem.c)


@dataclass
class ProxResult:
    beta: np.ndarray
    lam: np.ndarray
    state: FixedPointState


def prox_gamma(problem: ProxProblem,
               kappa: float = 0.2,
               tol: float = 1e-2,
               warm_start: np.ndarray | None = None,
               max_iter: int = 10000) -> ProxResult:
    """Prox of rho * Gamma at (alpha, mu) over the constraint set.

    Returns the scale block recovered from the fixed point, the
    regression block from the closed-form update, and the terminal
    fixed-point state (carrying the non-convergence flag, if any).
    """
    state = picard_opial_fixed_point(problem, v0=warm_start, kappa=kappa,
                                     tol=tol, max_iter=max_iter)
    lam = problem.mu - problem.c * problem.composite.apply_t(state.v)
    np.maximum(lam, 0.0, out=lam)
    beta = beta_from_lambda(problem.alpha, lam, problem.rho)
    return ProxResult(beta, lam, state)
