"""Synthetic experiment protocols: region recovery, scaling, wavelet trees.

Desk-scale reproductions of the statistical and efficiency studies:
contiguous-region recovery in 1D and 2D against a Lasso baseline,
fixed-point iteration-count and prox-cost scaling on 2D grids, and a
compressive-sensing style experiment on tree-structured wavelet
coefficients.  Everything is driven by a declarative spec and a single
integer seed; per-cell generators are derived deterministically.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import haar
from .prox import CompositeMap, ProxProblem, picard_opial_fixed_point
from .sets import (ConstraintSet, grid_constraint_1d, grid_constraint_2d,
                   tree_constraint)
from .solver import RegressionProblem, SolverConfig, lasso_fista, nepio_solve

CSV_HEADER = ["method", "m", "run", "model_error", "wall_time_ms",
              "inner_iters_mean", "rho_selected", "alpha_selected"]

REGION_1D_LENGTHS = {1: 20, 2: 10, 3: 7, 4: 5}
REGION_2D_PRESETS = {
    "one_5x5": [(5, 5)],
    "two_4x4_3x3": [(4, 4), (3, 3)],
    "three_3x3": [(3, 3), (3, 3), (3, 3)],
    "four_3x2": [(3, 2), (3, 2), (3, 2), (3, 2)],
}


@dataclass
class ExperimentSpec:
    kind: str  # regions1d | regions2d | scaling | wavelet_tree
    n: int = 200
    rows: int = 20
    cols: int = 20
    sparsity: int = 20
    region_count: int = 2
    region_preset: str = "two_4x4_3x3"
    sample_sizes: list[int] | None = None
    runs: int = 10
    noise_std: float = 0.0
    snr_db: float | None = None
    rho_grid: list[float] | None = None
    alpha_grid: list[float] = field(default_factory=lambda: [0.5, 1.0, 2.0, 4.0])
    methods: list[str] | None = None
    selection: str = "oracle"  # oracle | validation
    seed: int = 0
    kappa: float = 0.2
    inner_tol: float = 1e-2
    outer_tol: float = 1e-8
    max_outer: int = 1500

    def __post_init__(self):
        if self.kind not in ("regions1d", "regions2d", "scaling", "wavelet_tree"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.selection not in ("oracle", "validation"):
            raise ValueError(f"unknown selection rule {self.selection!r}")
        if self.methods is None:
            self.methods = {
                "regions1d": ["lasso", "grid_c"],
                "regions2d": ["lasso", "grid_c"],
                "scaling": ["grid_c"],
                "wavelet_tree": ["lasso", "tree_c"],
            }[self.kind]
        if self.sample_sizes is None:
            self.sample_sizes = {
                "regions1d": [22, 40, 60, 80, 100],
                "regions2d": [30, 50, 80, 120, 160],
                "scaling": [256, 1024, 4096],
                "wavelet_tree": [],  # per-run multiple of the model sparsity
            }[self.kind]

    def to_json(self) -> dict:
        d = asdict(self)
        d["schema_version"] = 1
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ExperimentSpec":
        d = dict(d)
        d.pop("schema_version", None)
        return cls(**d)


@dataclass
class ResultRecord:
    method: str
    m: int
    run: int
    model_error: float
    wall_time_ms: float
    inner_iters_mean: float
    rho_selected: float
    alpha_selected: float | None = None

    def __post_init__(self):
        if self.model_error < 0:
            raise ValueError("model error is a norm ratio, cannot be negative")


def make_region_model_1d(n: int, regions: int, sparsity: int,
                         rng: np.random.Generator) -> np.ndarray:
    """Sparse vector whose support is ``regions`` contiguous runs of +-1.

    Region length is the shipped preset length when (regions, sparsity)
    matches it, otherwise sparsity // regions.  Runs are placed
    uniformly at random with at least one zero between them.
    """
    if regions < 1 or sparsity < regions:
        raise ValueError("need at least one nonzero per region")
    if sparsity == 20 and regions in REGION_1D_LENGTHS:
        length = REGION_1D_LENGTHS[regions]
    else:
        length = sparsity // regions
    free = n - regions * length - (regions - 1)
    if free < 0:
        raise ValueError(f"cannot pack {regions} runs of {length} into {n} slots")
    picks = np.sort(rng.choice(free + regions, size=regions, replace=False))
    extra_gaps = picks - np.arange(regions)
    beta = np.zeros(n)
    start = 0
    prev_extra = 0
    for i in range(regions):
        start += extra_gaps[i] - prev_extra + (0 if i == 0 else length + 1)
        beta[start:start + length] = rng.integers(0, 2, size=length) * 2.0 - 1.0
        prev_extra = extra_gaps[i]
    return beta


def make_region_model_2d(rows: int, cols: int, preset: str,
                         rng: np.random.Generator,
                         max_tries: int = 1000) -> np.ndarray:
    """Matrix-shaped model with non-overlapping rectangular +-1 regions."""
    if preset not in REGION_2D_PRESETS:
        raise ValueError(f"unknown 2D region preset {preset!r}")
    rects = REGION_2D_PRESETS[preset]
    for _ in range(max_tries):
        occupied = np.zeros((rows, cols), dtype=bool)
        beta = np.zeros((rows, cols))
        ok = True
        for (h, w) in rects:
            r = int(rng.integers(0, rows - h + 1))
            c = int(rng.integers(0, cols - w + 1))
            # 1-cell halo keeps the regions separated
            halo = occupied[max(0, r - 1):r + h + 1, max(0, c - 1):c + w + 1]
            if halo.any():
                ok = False
                break
            occupied[r:r + h, c:c + w] = True
            beta[r:r + h, c:c + w] = rng.integers(0, 2, size=(h, w)) * 2.0 - 1.0
        if ok:
            return beta
    raise ValueError(f"could not place {preset} regions in a {rows}x{cols} grid")


def gaussian_design(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """m x n matrix of i.i.d. standard normal entries."""
    if m < 1 or n < 1:
        raise ValueError("design dimensions must be positive")
    return rng.standard_normal((m, n))


def generate_output(X: np.ndarray, beta_star: np.ndarray, noise_std: float,
                    rng: np.random.Generator) -> np.ndarray:
    """Response X beta_star plus isotropic Gaussian noise (exact when std 0)."""
    y = X @ beta_star
    if noise_std > 0:
        y = y + noise_std * rng.standard_normal(len(y))
    return y


def model_error(beta_hat: np.ndarray, beta_star: np.ndarray) -> float:
    return float(np.linalg.norm(beta_hat - beta_star) / np.linalg.norm(beta_star))


def default_rho_grid(X: np.ndarray, y: np.ndarray, points: int = 8) -> list[float]:
    scale = float(np.max(np.abs(X.T @ y))) / X.shape[0]
    return list(np.geomspace(1e-4, 1e1, points) * max(scale, 1e-12))


_KIND_IDS = {"regions1d": 1, "regions2d": 2, "scaling": 3, "wavelet_tree": 4}


def _cell_rng(spec: ExperimentSpec, m: int, run: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([spec.seed, _KIND_IDS[spec.kind], m, run]))


def _solver_config(spec: ExperimentSpec, lipschitz: float | None = None) -> SolverConfig:
    return SolverConfig(kappa=spec.kappa, inner_tol=spec.inner_tol,
                        outer_tol=spec.outer_tol, max_outer=spec.max_outer,
                        lipschitz=lipschitz)


def _sweep_method(method: str, spec: ExperimentSpec, X, y, beta_star,
                  constraint_for_alpha) -> ResultRecord | None:
    """Best-hyperparameter record for one (method, data) cell."""
    rho_grid = spec.rho_grid or default_rho_grid(X, y)
    if spec.selection == "validation":
        split = int(0.8 * len(y))
        X_fit, y_fit = X[:split], y[:split]
        X_val, y_val = X[split:], y[split:]
    else:
        X_fit, y_fit = X, y
    alphas = spec.alpha_grid if method == "grid_c" else [None]
    best = None
    from .solver import lipschitz_constant
    L = lipschitz_constant(X_fit)
    for alpha in alphas:
        constraint = constraint_for_alpha(alpha) if method != "lasso" else None
        for rho in rho_grid:
            problem = RegressionProblem(X_fit, y_fit, rho)
            config = _solver_config(spec, lipschitz=L)
            t0 = time.perf_counter()
            if method == "lasso":
                state = lasso_fista(problem, config)
            else:
                state = nepio_solve(problem, constraint, config)
            elapsed_ms = (time.perf_counter() - t0) * 1e3
            if spec.selection == "validation":
                score = float(np.mean((X_val @ state.beta - y_val) ** 2))
            else:
                score = model_error(state.beta, beta_star)
            if best is None or score < best[0]:
                inner = float(np.mean(state.inner_iteration_counts)) \
                    if state.inner_iteration_counts else 0.0
                best = (score, ResultRecord(
                    method=method, m=X.shape[0], run=-1,
                    model_error=model_error(state.beta, beta_star),
                    wall_time_ms=elapsed_ms, inner_iters_mean=inner,
                    rho_selected=rho,
                    alpha_selected=alpha))
    return best[1] if best else None


def prox_benchmark(constraint: ConstraintSet, rho: float, repetitions: int,
                   rng: np.random.Generator, kappa: float = 0.2,
                   tol: float = 1e-2) -> tuple[float, float, float]:
    """Cold-start prox timings: (mean iterations, mean ms, std ms)."""
    composite = CompositeMap(constraint.edge_map)
    iters, times = [], []
    n = constraint.n
    for _ in range(repetitions):
        alpha = rng.standard_normal(n)
        mu = np.abs(rng.standard_normal(n))
        pp = ProxProblem(alpha, mu, rho, constraint, composite=composite)
        t0 = time.perf_counter()
        state = picard_opial_fixed_point(pp, kappa=kappa, tol=tol)
        times.append((time.perf_counter() - t0) * 1e3)
        iters.append(state.iteration)
    return float(np.mean(iters)), float(np.mean(times)), float(np.std(times))


def _run_regions(spec: ExperimentSpec) -> list[ResultRecord]:
    records = []
    for m in spec.sample_sizes:
        for run in range(spec.runs):
            rng = _cell_rng(spec, m, run)
            if spec.kind == "regions1d":
                n = spec.n
                beta_star = make_region_model_1d(n, spec.region_count,
                                                 spec.sparsity, rng)

                def constraint_for_alpha(alpha, n=n):
                    return grid_constraint_1d(n, alpha)
            else:
                n = spec.rows * spec.cols
                beta_star = make_region_model_2d(spec.rows, spec.cols,
                                                 spec.region_preset, rng).ravel()

                def constraint_for_alpha(alpha, spec=spec):
                    return grid_constraint_2d(spec.rows, spec.cols, alpha)
            X = gaussian_design(m, n, rng)
            y = generate_output(X, beta_star, spec.noise_std, rng)
            for method in spec.methods:
                rec = _sweep_method(method, spec, X, y, beta_star,
                                    constraint_for_alpha)
                rec.run = run
                records.append(rec)
    return records


def _run_wavelet_tree(spec: ExperimentSpec) -> list[ResultRecord]:
    side = spec.rows
    records = []
    sample_sizes = spec.sample_sizes or [None]
    for m_spec in sample_sizes:
        for run in range(spec.runs):
            rng = _cell_rng(spec, m_spec or 0, run)
            beta_star, tree = haar.haar_tree_setup(side, rng)
            sparsity = int(np.sum(np.abs(beta_star) > 1e-10))
            m = m_spec if m_spec else 3 * sparsity
            n = side * side
            X = gaussian_design(m, n, rng)
            clean = X @ beta_star
            if spec.snr_db is not None:
                noise_std = float(np.linalg.norm(clean) / np.sqrt(m)
                                  * 10 ** (-spec.snr_db / 20.0))
            else:
                noise_std = spec.noise_std
            y = clean + (noise_std * rng.standard_normal(m) if noise_std > 0 else 0.0)
            parents = haar.quadtree_parents(side)
            for method in spec.methods:
                rec = _sweep_method(method, spec, X, y, beta_star,
                                    lambda alpha, parents=parents: tree_constraint(parents))
                rec.run = run
                records.append(rec)
    return records


def _run_scaling(spec: ExperimentSpec) -> list[ResultRecord]:
    """Cold-start prox cost and iteration counts across 2D grid sizes."""
    records = []
    rho = (spec.rho_grid or [0.25])[0]
    alpha = spec.alpha_grid[1] if len(spec.alpha_grid) > 1 else spec.alpha_grid[0]
    for n in spec.sample_sizes:
        side = int(round(np.sqrt(n)))
        if side * side != n:
            raise ValueError(f"scaling sizes must be perfect squares, got {n}")
        rng = _cell_rng(spec, n, 0)
        constraint = grid_constraint_2d(side, side, alpha)
        mean_iters, mean_ms, _ = prox_benchmark(
            constraint, rho, spec.runs, rng, kappa=spec.kappa, tol=spec.inner_tol)
        records.append(ResultRecord(
            method="grid_c", m=n, run=0, model_error=0.0,
            wall_time_ms=mean_ms, inner_iters_mean=mean_iters,
            rho_selected=rho, alpha_selected=alpha))
    return records


def run_experiment(spec: ExperimentSpec) -> list[ResultRecord]:
    """Execute one experiment spec and return its result records."""
    if spec.kind in ("regions1d", "regions2d"):
        return _run_regions(spec)
    if spec.kind == "wavelet_tree":
        return _run_wavelet_tree(spec)
    return _run_scaling(spec)


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{x:.10g}"


def write_csv(records: list[ResultRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([r.method, r.m, r.run, _fmt(r.model_error),
                             _fmt(r.wall_time_ms), _fmt(r.inner_iters_mean),
                             _fmt(r.rho_selected), _fmt(r.alpha_selected)])


def read_csv(path) -> list[ResultRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        for row in reader:
            records.append(ResultRecord(
                method=row["method"], m=int(row["m"]), run=int(row["run"]),
                model_error=float(row["model_error"]),
                wall_time_ms=float(row["wall_time_ms"]),
                inner_iters_mean=float(row["inner_iters_mean"]),
                rho_selected=float(row["rho_selected"]),
                alpha_selected=float(row["alpha_selected"]) if row["alpha_selected"] else None))
    return records


def summarize(records: list[ResultRecord]) -> list[str]:
    """Mean model error per (method, m), one line each."""
    keys = sorted({(r.method, r.m) for r in records})
    lines = []
    for method, m in keys:
        errs = [r.model_error for r in records if r.method == method and r.m == m]
        lines.append(f"{method} m={m}: mean model error {np.mean(errs):.4f} "
                     f"(stderr {np.std(errs) / np.sqrt(len(errs)):.4f}, runs {len(errs)})")
    return lines


PRESETS = {
    "regions1d": lambda seed=7: ExperimentSpec(kind="regions1d", seed=seed),
    "regions2d": lambda seed=7: ExperimentSpec(kind="regions2d", seed=seed),
    "scaling": lambda seed=7: ExperimentSpec(kind="scaling", runs=5, seed=seed),
    "wavelet_tree": lambda seed=7: ExperimentSpec(
        kind="wavelet_tree", rows=16, cols=16, runs=5, snr_db=20.0, seed=seed),
}
