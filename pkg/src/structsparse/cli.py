"""Command-line entry point.

Three verbs: ``solve`` runs the structured solver on JSON problem and
constraint files, ``experiment`` executes a spec or preset and writes
the result CSV, ``bench-prox`` times the prox computation.  Exit codes:
0 success, 1 input error, 2 flagged non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import experiments
from .sets import constraint_from_json, free_constraint, grid_constraint_1d, \
    grid_constraint_2d
from .solver import RegressionProblem, SolverConfig, nepio_solve


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kappa", type=float, default=0.2)
    parser.add_argument("--inner-tol", type=float, default=1e-2)
    parser.add_argument("--outer-tol", type=float, default=1e-8)
    parser.add_argument("--max-outer", type=int, default=10000)
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="structsparse")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_solve = sub.add_parser("solve", help="solve one regression problem")
    p_solve.add_argument("problem", help="JSON file with X, y, rho")
    p_solve.add_argument("constraint", help="JSON constraint-set description")
    p_solve.add_argument("--out", default="result.json")
    _add_solver_flags(p_solve)

    p_exp = sub.add_parser("experiment", help="run an experiment spec or preset")
    p_exp.add_argument("spec", help="JSON spec file or preset name "
                       f"({', '.join(experiments.PRESETS)})")
    p_exp.add_argument("out_csv")
    p_exp.add_argument("--seed", type=int, default=None)
    p_exp.add_argument("--select", choices=["oracle", "validation"], default=None)

    p_bench = sub.add_parser("bench-prox", help="time the prox computation")
    p_bench.add_argument("--n", type=int, required=True)
    p_bench.add_argument("--structure", choices=["grid1d", "grid2d"], default="grid1d")
    p_bench.add_argument("--alpha", type=float, default=1.0)
    p_bench.add_argument("--rho", type=float, default=0.25)
    p_bench.add_argument("--repetitions", type=int, default=10)
    _add_solver_flags(p_bench)
    return parser


def _cmd_solve(args) -> int:
    try:
        with open(args.problem) as fh:
            pdata = json.load(fh)
        with open(args.constraint) as fh:
            cdata = json.load(fh)
        X = np.asarray(pdata["X"], dtype=float)
        y = np.asarray(pdata["y"], dtype=float)
        problem = RegressionProblem(X, y, float(pdata["rho"]))
        constraint = constraint_from_json(cdata) if cdata else free_constraint(problem.n)
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    config = SolverConfig(kappa=args.kappa, inner_tol=args.inner_tol,
                          outer_tol=args.outer_tol, max_outer=args.max_outer)
    state = nepio_solve(problem, constraint, config)
    with open(args.out, "w") as fh:
        json.dump(state.to_json(), fh, indent=1)
    if not (state.converged and state.inner_converged):
        print("warning: solver did not converge within its budget", file=sys.stderr)
        return 2
    return 0


def _cmd_experiment(args) -> int:
    try:
        if args.spec in experiments.PRESETS:
            spec = experiments.PRESETS[args.spec]()
        else:
            with open(args.spec) as fh:
                data = json.load(fh)
            if "preset" in data:
                preset = data.pop("preset")
                if preset not in experiments.PRESETS:
                    raise ValueError(f"unknown preset {preset!r}")
                spec = experiments.PRESETS[preset]()
                data.pop("schema_version", None)
                for key, value in data.items():
                    if not hasattr(spec, key):
                        raise ValueError(f"unknown spec field {key!r}")
                    setattr(spec, key, value)
            else:
                spec = experiments.ExperimentSpec.from_json(data)
        if args.seed is not None:
            spec.seed = args.seed
        if args.select is not None:
            spec.selection = args.select
    except (OSError, TypeError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    records = experiments.run_experiment(spec)
    experiments.write_csv(records, args.out_csv)
    for line in experiments.summarize(records):
        print(line)
    return 0


def _cmd_bench_prox(args) -> int:
    if args.n < 2:
        print("error: n must be at least 2", file=sys.stderr)
        return 1
    if args.structure == "grid2d":
        side = int(round(np.sqrt(args.n)))
        if side * side != args.n:
            print("error: grid2d bench needs a square n", file=sys.stderr)
            return 1
        constraint = grid_constraint_2d(side, side, args.alpha)
    else:
        constraint = grid_constraint_1d(args.n, args.alpha)
    rng = np.random.default_rng(args.seed)
    mean_iters, mean_ms, std_ms = experiments.prox_benchmark(
        constraint, args.rho, args.repetitions, rng,
        kappa=args.kappa, tol=args.inner_tol)
    print(f"n={args.n} structure={args.structure} repetitions={args.repetitions}")
    print(f"mean iterations: {mean_iters:.1f}")
    print(f"wall time: {mean_ms:.3f} ms +- {std_ms:.3f} ms")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "solve":
        return _cmd_solve(args)
    if args.verb == "experiment":
        return _cmd_experiment(args)
    return _cmd_bench_prox(args)


if __name__ == "__main__":
    sys.exit(main())
