"""Structured-sparsity regression via fixed-point proximity operators.

The penalty couples the regression vector with an auxiliary scale
vector constrained to a graph-structured set; the solver is an
accelerated proximal method whose prox step is computed by an averaged
fixed-point iteration.
"""

from .sets import (ConstraintSet, EdgeMap, L1Ball, NonnegativeOrthantCone,
                   constraint_from_json, free_constraint, grid_constraint_1d,
                   grid_constraint_2d, grid_edge_map_1d, grid_edge_map_2d,
                   is_feasible, project_l1_ball, project_simple,
                   tree_constraint, tree_edge_map)
from .prox import (CompositeMap, FixedPointState, ProxProblem, ProxResult,
                   beta_from_lambda, cubic_prox_scalar, cubic_prox_vec,
                   picard_opial_fixed_point, prox_gamma, prox_phi, prox_phi1)
from .solver import (RegressionProblem, SolverConfig, SolverState,
                     gamma_objective, lasso_fista, lasso_objective,
                     lipschitz_constant, nepio_solve, theta_next)
from .haar import haar2d, haar_tree_setup, ihaar2d, quadtree_parents

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
