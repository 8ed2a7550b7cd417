"""Jitted engine for the averaged fixed-point inner loop.

Scalar-loop translation of the numpy reference path in
:mod:`structsparse.prox`; the two are cross-checked in the test suite.
The kernel keeps the edge map as raw index arrays so one inner
iteration costs O(n + k) with no temporaries.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# simple-set tags understood by the kernel
SET_ORTHANT = 0
SET_L1BALL = 1


@njit(cache=True)
def _largest_root(b, d):
    """Largest real root of x^3 + b x^2 + d, d <= 0 (scalar)."""
    p = -b * b / 3.0
    q = d + 2.0 * b * b * b / 27.0
    disc = -(4.0 * p * p * p + 27.0 * q * q)
    if disc >= 0.0 and p < 0.0:
        m = 2.0 * np.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        if arg > 1.0:
            arg = 1.0
        elif arg < -1.0:
            arg = -1.0
        y = m * np.cos(np.arccos(arg) / 3.0)
    else:
        s = q * q / 4.0 + p * p * p / 27.0
        if s < 0.0:
            s = 0.0
        s = np.sqrt(s)
        y = np.cbrt(-q / 2.0 + s) + np.cbrt(-q / 2.0 - s)
    x = y - b / 3.0
    lo = -b if -b > 0.0 else 0.0
    cb = np.cbrt(np.abs(d))
    hi = lo + (cb if cb > 1.0 else 1.0)
    if x < lo:
        x = lo
    elif x > hi:
        x = hi
    for _ in range(2):
        f = x * x * (x + b) + d
        fp = x * (3.0 * x + 2.0 * b)
        if fp > 0.0:
            x -= f / fp
            if x < lo:
                x = lo
            elif x > hi:
                x = hi
    scale = 1.0 + np.abs(b) * x * x + np.abs(d)
    if np.abs(x * x * (x + b) + d) > 1e-10 * scale:
        xlo, xhi = lo, hi
        for _ in range(100):
            mid = 0.5 * (xlo + xhi)
            if mid * mid * (mid + b) + d > 0.0:
                xhi = mid
            else:
                xlo = mid
        x = 0.5 * (xlo + xhi)
    return x


@njit(cache=True)
def _cubic_prox(mu, alpha, r, rho):
    b = (r - 2.0 * (mu + rho)) / 2.0
    d = -r * alpha * alpha / 2.0
    x0 = _largest_root(b, d)
    s = x0 - rho
    return s if s > 0.0 else 0.0


@njit(cache=True)
def _project_l1_inplace(t, radius):
    k = t.size
    total = 0.0
    for i in range(k):
        total += np.abs(t[i])
    if total <= radius:
        return
    u = np.sort(np.abs(t))[::-1]
    css = 0.0
    theta = 0.0
    for j in range(k):
        css += u[j]
        cand = (css - radius) / (j + 1.0)
        if u[j] > cand:
            theta = cand
    for i in range(k):
        a = np.abs(t[i]) - theta
        if a <= 0.0:
            t[i] = 0.0
        elif t[i] < 0.0:
            t[i] = -a
        else:
            t[i] = a


@njit(cache=True)
def picard_loop(v, pos, neg, b_mu, alpha, rho, r, c, kappa, tol, max_iter,
                set_kind, set_radius):
    """Averaged Picard iteration; mutates and returns v.

    Returns (iterations, residual, converged).
    """
    n = alpha.size
    k = pos.size
    d = n + k
    bt = np.empty(n)
    z = np.empty(d)
    one_minus = 1.0 - kappa
    residual = np.inf
    for it in range(1, max_iter + 1):
        for i in range(n):
            bt[i] = v[i]
        for e in range(k):
            ve = v[n + e]
            bt[pos[e]] += ve
            bt[neg[e]] -= ve
        for i in range(n):
            z[i] = v[i] - c * bt[i] + b_mu[i]
        for e in range(k):
            z[n + e] = v[n + e] - c * (bt[pos[e]] - bt[neg[e]]) + b_mu[n + e]
        # H(z-part): subtract the block prox
        t = z[n:].copy()
        if set_kind == SET_L1BALL:
            _project_l1_inplace(t, set_radius)
        else:
            for e in range(k):
                if t[e] < 0.0:
                    t[e] = 0.0
        diff_sq = 0.0
        norm_sq = 0.0
        for i in range(n):
            h = z[i] - _cubic_prox(z[i], alpha[i], r, rho)
            vn = kappa * v[i] + one_minus * h
            diff_sq += (vn - v[i]) ** 2
            norm_sq += v[i] * v[i]
            v[i] = vn
        for e in range(k):
            h = z[n + e] - t[e]
            vn = kappa * v[n + e] + one_minus * h
            diff_sq += (vn - v[n + e]) ** 2
            norm_sq += v[n + e] ** 2
            v[n + e] = vn
        denom = np.sqrt(norm_sq)
        if denom < 1e-12:
            denom = 1e-12
        residual = np.sqrt(diff_sq) / denom
        if residual <= tol:
            return it, residual, True
    return max_iter, residual, False
