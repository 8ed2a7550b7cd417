"""Acceptance suite: one test per release criterion, pinned tolerances.

Each test prints a single PASS line on success (visible with -v through
the test status, and directly when capture is off); a failure surfaces
the measured numbers in the assertion message.
"""

import time

import numpy as np
import pytest

import structsparse as ss
from structsparse import haar
from structsparse.experiments import ExperimentSpec, run_experiment
from structsparse.oracles import full_problem_oracle, lasso_subgradient_oracle, prox_oracle
from structsparse.prox import apply_h


def _report(name, ok, detail):
    line = f"{name} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    assert ok, line


def chain_tree(n):
    parent = np.arange(n)
    parent[1:] = np.arange(n - 1)
    return ss.tree_constraint(parent)


def prox_objective(beta, lam, alpha, mu, rho):
    ratio = np.where(lam > 0, beta * beta / np.where(lam > 0, lam, 1.0),
                     np.where(beta != 0, np.inf, 0.0))
    return (0.5 * np.sum((beta - alpha) ** 2) + 0.5 * np.sum((lam - mu) ** 2)
            + rho * 0.5 * np.sum(ratio + lam))


def test_a1_cubic_prox_beats_dense_grid():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    s_grid = np.arange(0.0, 20.0, 1e-4)
    worst = -np.inf
    for _ in range(1000):
        mu = float(rng.uniform(-5, 5))
        alpha = float(rng.uniform(-5, 5))
        r = float(rng.uniform(1e-6, 5))
        rho = float(rng.uniform(1e-6, 5))
        s = ss.cubic_prox_scalar(mu, alpha, r, rho)
        h = lambda t: (t - mu) ** 2 + r * (alpha * alpha / (t + rho) + t)
        gap = h(s) - np.min(h(s_grid))
        worst = max(worst, gap)
        assert gap <= 1e-6, f"A1 FAIL: gap {gap:.3e} at mu={mu}, alpha={alpha}, r={r}, rho={rho}"
    elapsed = time.perf_counter() - t0
    _report("A1", worst <= 1e-6 and elapsed < 5.0,
            f"worst gap {worst:.3e} (<= 1e-6), runtime {elapsed:.2f}s (< 5s)")


def test_a2_prox_fixed_point_matches_oracle():
    rng = np.random.default_rng(42)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(50):
        n = int(rng.integers(4, 13))
        cons = ss.grid_constraint_1d(n, 1.0) if i % 2 == 0 else chain_tree(n)
        alpha = rng.standard_normal(n) * 2.0
        mu = rng.standard_normal(n)
        rho = float(rng.uniform(0.1, 2.0))
        beta_o, lam_o = prox_oracle(alpha, mu, rho, cons)
        res = ss.prox_gamma(ss.ProxProblem(alpha, mu, rho, cons),
                            tol=1e-10, max_iter=200000)
        f_o = prox_objective(beta_o, lam_o, alpha, mu, rho)
        f_g = prox_objective(res.beta, res.lam, alpha, mu, rho)
        rel = abs(f_g - f_o) / max(abs(f_o), 1e-12)
        worst = max(worst, rel)
        assert rel <= 1e-4, f"A2 FAIL: rel {rel:.3e} on instance {i} (n={n})"
    elapsed = time.perf_counter() - t0
    _report("A2", worst <= 1e-4 and elapsed < 120.0,
            f"worst rel {worst:.3e} (<= 1e-4), runtime {elapsed:.1f}s (< 2min)")


def test_a3_lasso_reduction():
    rng = np.random.default_rng(7)
    worst_pair = worst_oracle = 0.0
    for _ in range(20):
        m, n = 30, 50
        X = rng.standard_normal((m, n))
        beta = np.zeros(n)
        idx = rng.choice(n, size=5, replace=False)
        beta[idx] = rng.standard_normal(5)
        y = X @ beta + 0.05 * rng.standard_normal(m)
        prob = ss.RegressionProblem(X, y, 0.4)
        cons = ss.free_constraint(n)
        st = ss.nepio_solve(prob, cons, ss.SolverConfig(
            inner_tol=1e-6, outer_tol=1e-12, max_outer=30000))
        fi = ss.lasso_fista(prob, ss.SolverConfig(outer_tol=1e-14, max_outer=30000))
        f_st = ss.gamma_objective(prob, st.beta, st.lam)
        f_fi = ss.lasso_objective(prob, fi.beta)
        rel_pair = abs(f_st - f_fi) / max(abs(f_fi), 1e-12)
        worst_pair = max(worst_pair, rel_pair)
        f_sub = ss.lasso_objective(prob, lasso_subgradient_oracle(prob))
        rel_oracle = max(abs(f_st - f_sub), abs(f_fi - f_sub)) / max(abs(f_sub), 1e-12)
        worst_oracle = max(worst_oracle, rel_oracle)
        assert rel_pair <= 1e-6 and rel_oracle <= 1e-4, \
            f"A3 FAIL: pair rel {rel_pair:.3e}, oracle rel {rel_oracle:.3e}"
    _report("A3", worst_pair <= 1e-6 and worst_oracle <= 1e-4,
            f"worst pair rel {worst_pair:.3e} (<= 1e-6), "
            f"worst oracle rel {worst_oracle:.3e} (<= 1e-4)")


def test_a4_solver_at_most_oracle_objective():
    rng = np.random.default_rng(11)
    worst = -np.inf
    for i in range(20):
        n = int(rng.integers(6, 21))
        m = int(rng.integers(n, 41))
        X = rng.standard_normal((m, n))
        beta = np.zeros(n)
        k = max(1, n // 4)
        beta[rng.choice(n, size=k, replace=False)] = rng.standard_normal(k)
        y = X @ beta + 0.1 * rng.standard_normal(m)
        prob = ss.RegressionProblem(X, y, 0.3)
        cons = ss.grid_constraint_1d(n, 1.0) if i % 2 == 0 else chain_tree(n)
        beta_o, lam_o = full_problem_oracle(prob, cons)
        f_o = ss.gamma_objective(prob, beta_o, lam_o)
        st = ss.nepio_solve(prob, cons, ss.SolverConfig(
            inner_tol=1e-5, outer_tol=1e-10, max_outer=20000))
        f_s = ss.gamma_objective(prob, st.beta, st.lam)
        rel = (f_s - f_o) / max(abs(f_o), 1e-12)
        worst = max(worst, rel)
        assert rel <= 1e-3, f"A4 FAIL: rel excess {rel:.3e} on instance {i}"
    _report("A4", worst <= 1e-3,
            f"worst relative excess {worst:.3e} (<= 1e-3, one-sided)")


def _mean_errors(records):
    out = {}
    for method in {r.method for r in records}:
        out[method] = float(np.mean([r.model_error for r in records
                                     if r.method == method]))
    return out


def test_a5_region_recovery_beats_lasso_1d():
    t0 = time.perf_counter()
    spec = ExperimentSpec(kind="regions1d", n=200, region_count=2,
                          sample_sizes=[40], runs=10, seed=7)
    means = _mean_errors(run_experiment(spec))
    elapsed = time.perf_counter() - t0
    _report("A5-1d", means["grid_c"] < means["lasso"] and elapsed < 600.0,
            f"mean error grid_c {means['grid_c']:.4f} < lasso {means['lasso']:.4f}, "
            f"runtime {elapsed:.0f}s (< 10min)")


def test_a5_region_recovery_beats_lasso_2d():
    t0 = time.perf_counter()
    spec = ExperimentSpec(kind="regions2d", rows=20, cols=20,
                          region_preset="two_4x4_3x3",
                          sample_sizes=[50], runs=10, seed=7)
    means = _mean_errors(run_experiment(spec))
    elapsed = time.perf_counter() - t0
    _report("A5-2d", means["grid_c"] < means["lasso"] and elapsed < 600.0,
            f"mean error grid_c {means['grid_c']:.4f} < lasso {means['lasso']:.4f}, "
            f"runtime {elapsed:.0f}s (< 10min)")


def test_a6_scaling_iteration_band_and_cost():
    t0 = time.perf_counter()
    spec = ExperimentSpec(kind="scaling", sample_sizes=[256, 1024, 4096],
                          runs=5, inner_tol=1e-2, seed=7)
    records = {r.m: r for r in run_experiment(spec)}
    iters = {n: records[n].inner_iters_mean for n in (256, 1024, 4096)}
    band_ok = all(10.0 <= iters[n] <= 80.0 for n in iters)
    # the n=256 cell runs first and absorbs one-time loading overhead,
    # so the timing ratio compares two warm measurements
    ratio = records[4096].wall_time_ms / records[1024].wall_time_ms
    elapsed = time.perf_counter() - t0
    _report("A6", band_ok and ratio <= 6.0 and elapsed < 600.0,
            f"mean inner iterations {iters} (all in [10, 80]), "
            f"time ratio 4096/1024 = {ratio:.2f} (<= 6), runtime {elapsed:.0f}s")


def test_a7_invariant_suites():
    rng = np.random.default_rng(17)
    # nonexpansiveness of H and of I - prox over 1000 random pairs each
    cons = ss.grid_constraint_1d(8, 1.0)
    pp = ss.ProxProblem(rng.standard_normal(8), np.abs(rng.standard_normal(8)),
                        0.5, cons)
    d = pp.composite.d
    r = pp.rho / pp.c
    for _ in range(1000):
        u = rng.standard_normal(d) * 3.0
        w = rng.standard_normal(d) * 3.0
        lhs = np.linalg.norm(apply_h(pp, u) - apply_h(pp, w))
        assert lhs <= np.linalg.norm(u - w) + 1e-10, "A7 FAIL: H expansive"
        pu = u - ss.prox_phi(u, pp, r)
        pw = w - ss.prox_phi(w, pp, r)
        assert np.linalg.norm(pu - pw) <= np.linalg.norm(u - w) + 1e-10, \
            "A7 FAIL: I - prox expansive"

    # penalty lower bound and tightness over 1000 random vectors
    prob0 = ss.RegressionProblem(np.zeros((1, 6)), np.zeros(1), 1.0)
    for _ in range(1000):
        beta = rng.standard_normal(6) * 2.0
        lam = np.abs(rng.standard_normal(6)) + 1e-8
        assert ss.gamma_objective(prob0, beta, lam) >= np.sum(np.abs(beta)) - 1e-10
        tight = ss.gamma_objective(prob0, beta, np.abs(beta))
        assert abs(tight - np.sum(np.abs(beta))) <= 1e-10, "A7 FAIL: tightness"

    # sparsity containment on solver outputs
    for seed in range(5):
        r2 = np.random.default_rng(seed)
        X = r2.standard_normal((15, 10))
        y = X @ np.r_[np.ones(3), np.zeros(7)]
        prob = ss.RegressionProblem(X, y, 1.0)
        for cons2 in (ss.grid_constraint_1d(10, 0.5), chain_tree(10)):
            st = ss.nepio_solve(prob, cons2, ss.SolverConfig(max_outer=500))
            assert np.all(st.beta[st.lam == 0.0] == 0.0), "A7 FAIL: containment"

    # momentum recursion residuals over 1000 steps (relative scale)
    theta = 1.0
    for _ in range(1000):
        t_next = ss.theta_next(theta)
        res = t_next * t_next / (theta * theta) + t_next - 1.0
        assert abs(res) < 1e-12, f"A7 FAIL: theta residual {res:.3e}"
        pi = 1.0 - t_next + t_next / theta
        res_pi = pi - (1.0 - t_next + t_next / theta)
        assert abs(res_pi) < 1e-12
        theta = t_next

    # projection idempotence and minimality
    ball = ss.L1Ball(6, 1.0)
    cone = ss.NonnegativeOrthantCone(6)
    for _ in range(200):
        t = rng.standard_normal(6) * 2.0
        for simple in (ball, cone):
            p = ss.project_simple(simple, t)
            assert np.allclose(ss.project_simple(simple, p), p, atol=1e-12)
        z = rng.standard_normal(6)
        z = z / max(np.sum(np.abs(z)), 1.0)
        assert (np.linalg.norm(t - ball.project(t))
                <= np.linalg.norm(t - z) + 1e-12), "A7 FAIL: minimality"
    _report("A7", True, "nonexpansiveness, penalty bounds, containment, "
            "recursion residuals, projection laws all hold")


def test_a8_wavelet_tree():
    rng = np.random.default_rng(23)
    image = rng.standard_normal((16, 16))
    err = float(np.max(np.abs(haar.ihaar2d(haar.haar2d(image)) - image)))
    assert err <= 1e-10, f"A8 FAIL: round-trip error {err:.3e}"

    spec = ExperimentSpec(kind="wavelet_tree", rows=16, cols=16, runs=5,
                          snr_db=20.0, seed=7)
    means = _mean_errors(run_experiment(spec))
    _report("A8", err <= 1e-10 and means["tree_c"] < means["lasso"],
            f"round-trip max error {err:.2e} (<= 1e-10), "
            f"mean error tree_c {means['tree_c']:.4f} < lasso {means['lasso']:.4f}")
