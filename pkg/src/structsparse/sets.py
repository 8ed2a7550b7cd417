"""Constraint sets on the auxiliary scale vector.

A constraint set couples a signed edge map A (one row per graph edge,
entries +1/-1) with a simple set S, restricting the scale vector to
{lambda >= 0 : A lambda in S}.  Two simple sets are supported: the
nonnegative orthant cone (tree-structured, hierarchical sparsity) and
an l1 ball of given radius (grid-structured, contiguous-region
sparsity).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


class InvalidStructureError(ValueError):
    """Raised for malformed graph structures or dimension mismatches."""


@dataclass(frozen=True)
class EdgeMap:
    """Signed incidence operator of a graph with n nodes and k edges.

    Row ``i`` has +1 at ``pos[i]`` and -1 at ``neg[i]``, so applying the
    map to a node vector yields per-edge differences.  Stored sparsely;
    a CSR matrix is built once for fast matvecs.
    """

    n: int
    pos: np.ndarray
    neg: np.ndarray
    _csr: sp.csr_matrix = field(init=False, repr=False, compare=False)
    _csr_t: sp.csr_matrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pos = np.asarray(self.pos, dtype=np.intp)
        neg = np.asarray(self.neg, dtype=np.intp)
        if pos.shape != neg.shape or pos.ndim != 1:
            raise InvalidStructureError("pos/neg index arrays must be 1D of equal length")
        if np.any(pos == neg):
            raise InvalidStructureError("self-loop edge")
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "neg", neg)
        k = len(pos)
        if k:
            data = np.concatenate([np.ones(k), -np.ones(k)])
            rows = np.concatenate([np.arange(k), np.arange(k)])
            cols = np.concatenate([pos, neg])
            csr = sp.csr_matrix((data, (rows, cols)), shape=(k, self.n))
        else:
            csr = sp.csr_matrix((0, self.n))
        object.__setattr__(self, "_csr", csr)
        object.__setattr__(self, "_csr_t", csr.T.tocsr())

    @property
    def k(self) -> int:
        return len(self.pos)

    def matvec(self, lam: np.ndarray) -> np.ndarray:
        """Per-edge differences lambda[pos] - lambda[neg]."""
        return self._csr @ lam

    def rmatvec(self, t: np.ndarray) -> np.ndarray:
        return self._csr_t @ t

    def gram_matvec(self, lam: np.ndarray) -> np.ndarray:
        """Graph Laplacian action A^T A lam."""
        return self._csr_t @ (self._csr @ lam)

    def toarray(self) -> np.ndarray:
        return self._csr.toarray()

    def norm_sq_est(self, n_iter: int = 50, rtol: float = 1e-9) -> float:
        """Upper estimate of the squared spectral norm by power iteration.

        The estimate is inflated by 1% so it can safely be used as an
        upper bound in step-size computations.
        """
        if self.k == 0 or self.n == 0:
            return 0.0
        rng = np.random.default_rng(0)
        v = rng.standard_normal(self.n)
        v /= np.linalg.norm(v)
        est = 0.0
        for _ in range(n_iter):
            w = self.gram_matvec(v)
            new_est = float(v @ w)
            nw = np.linalg.norm(w)
            if nw == 0.0:
                return 0.0
            v = w / nw
            if est > 0 and abs(new_est - est) <= rtol * est:
                est = new_est
                break
            est = new_est
        return 1.01 * est


def grid_edge_map_1d(n: int) -> EdgeMap:
    """Edge map of the 1D path graph: row i is e_i - e_{i+1}."""
    if n < 2:
        raise InvalidStructureError(f"1D grid needs n >= 2, got {n}")
    idx = np.arange(n - 1)
    return EdgeMap(n, idx, idx + 1)


def grid_edge_map_2d(rows: int, cols: int) -> EdgeMap:
    """Edge map of the rows x cols grid graph, nodes flattened row-major.

    One row per horizontal and per vertical edge,
    k = rows*(cols-1) + (rows-1)*cols.  Orientation is
    lower index minus higher index.
    """
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise InvalidStructureError(f"degenerate grid {rows}x{cols}")
    node = np.arange(rows * cols).reshape(rows, cols)
    horiz_pos = node[:, :-1].ravel()
    horiz_neg = node[:, 1:].ravel()
    vert_pos = node[:-1, :].ravel()
    vert_neg = node[1:, :].ravel()
    return EdgeMap(rows * cols,
                   np.concatenate([horiz_pos, vert_pos]),
                   np.concatenate([horiz_neg, vert_neg]))


def tree_edge_map(parent: np.ndarray) -> EdgeMap:
    """Edge map of a rooted forest given as a parent-index array.

    Roots are marked by ``parent[i] == i`` (or a negative index).  Each
    non-root node contributes the row e_parent - e_child, so the conic
    constraint (differences >= 0) encodes parent scales dominating
    child scales.
    """
    parent = np.asarray(parent, dtype=np.intp)
    n = len(parent)
    is_root = (parent < 0) | (parent == np.arange(n))
    # cycle check: walking up from every node must reach a root
    depth = np.zeros(n, dtype=np.intp)
    for i in range(n):
        j, steps = i, 0
        while not is_root[j]:
            j = parent[j]
            steps += 1
            if steps > n:
                raise InvalidStructureError("cycle detected in parent array")
        depth[i] = steps
    children = np.flatnonzero(~is_root)
    return EdgeMap(n, parent[children], children)


@dataclass(frozen=True)
class NonnegativeOrthantCone:
    """The cone {t >= 0} in R^k."""

    dim: int

    def project(self, t: np.ndarray) -> np.ndarray:
        return np.maximum(t, 0.0)

    def to_json(self) -> dict:
        return {"kind": "orthant"}


@dataclass(frozen=True)
class L1Ball:
    """The l1 ball of radius alpha > 0 in R^k."""

    dim: int
    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"l1-ball radius must be positive, got {self.alpha}")

    def project(self, t: np.ndarray) -> np.ndarray:
        return project_l1_ball(t, self.alpha)

    def to_json(self) -> dict:
        return {"kind": "l1ball", "alpha": self.alpha}


SimpleSet = NonnegativeOrthantCone | L1Ball


def project_l1_ball(t: np.ndarray, alpha: float) -> np.ndarray:
    """Exact Euclidean projection onto {z : ||z||_1 <= alpha}.

    Sort-and-threshold algorithm, O(k log k).
    """
    a = np.abs(t)
    if a.sum() <= alpha:
        return np.asarray(t, dtype=float).copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    j = np.arange(1, len(u) + 1)
    rho = np.flatnonzero(u * j > css - alpha)[-1]
    theta = (css[rho] - alpha) / (rho + 1.0)
    return np.sign(t) * np.maximum(a - theta, 0.0)


def project_simple(simple_set: SimpleSet, t: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``t`` onto the simple set."""
    t = np.asarray(t, dtype=float)
    if t.shape != (simple_set.dim,):
        raise InvalidStructureError(
            f"point has shape {t.shape}, set lives in R^{simple_set.dim}")
    return simple_set.project(t)


@dataclass(frozen=True)
class ConstraintSet:
    """The set {lambda >= 0 : A lambda in S}."""

    edge_map: EdgeMap
    simple_set: SimpleSet

    def __post_init__(self):
        if self.simple_set.dim != self.edge_map.k:
            raise InvalidStructureError(
                f"simple set dimension {self.simple_set.dim} != edge count {self.edge_map.k}")

    @property
    def n(self) -> int:
        return self.edge_map.n

    @property
    def k(self) -> int:
        return self.edge_map.k

    def to_json(self) -> dict:
        raise NotImplementedError(
            "only sets built by the json constructors carry a serializable description")


@dataclass(frozen=True)
class _DescribedConstraintSet(ConstraintSet):
    # built by the named constructors below; remembers its description
    description: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return dict(self.description)


def _simple_from_json(desc: dict, k: int) -> SimpleSet:
    kind = desc.get("kind")
    if kind == "orthant":
        return NonnegativeOrthantCone(k)
    if kind == "l1ball":
        return L1Ball(k, float(desc["alpha"]))
    raise InvalidStructureError(f"unknown simple-set kind {kind!r}")


def constraint_from_json(desc: dict) -> ConstraintSet:
    """Build a constraint set from its JSON description.

    Schema: {"kind": "grid1d"|"grid2d"|"tree",
             "n" | "rows"/"cols" | "parents": ...,
             "set": {"kind": "l1ball", "alpha": a} | {"kind": "orthant"}}
    """
    kind = desc.get("kind")
    if kind == "grid1d":
        emap = grid_edge_map_1d(int(desc["n"]))
    elif kind == "grid2d":
        emap = grid_edge_map_2d(int(desc["rows"]), int(desc["cols"]))
    elif kind == "tree":
        emap = tree_edge_map(np.asarray(desc["parents"], dtype=np.intp))
    else:
        raise InvalidStructureError(f"unknown constraint kind {kind!r}")
    simple = _simple_from_json(desc.get("set", {"kind": "orthant"}), emap.k)
    return _DescribedConstraintSet(emap, simple, description=desc)


def grid_constraint_1d(n: int, alpha: float = 1.0) -> ConstraintSet:
    """1D grid with an l1 budget on neighbour differences."""
    return constraint_from_json(
        {"kind": "grid1d", "n": n, "set": {"kind": "l1ball", "alpha": alpha}})


def grid_constraint_2d(rows: int, cols: int, alpha: float = 1.0) -> ConstraintSet:
    """2D grid with an l1 budget on neighbour differences."""
    return constraint_from_json(
        {"kind": "grid2d", "rows": rows, "cols": cols,
         "set": {"kind": "l1ball", "alpha": alpha}})


def tree_constraint(parent: np.ndarray) -> ConstraintSet:
    """Rooted forest with parent-dominates-child cone constraints."""
    return constraint_from_json(
        {"kind": "tree", "parents": np.asarray(parent).tolist(),
         "set": {"kind": "orthant"}})


def free_constraint(n: int) -> ConstraintSet:
    """The unconstrained set {lambda >= 0} (no edges), i.e. the Lasso case."""
    emap = EdgeMap(n, np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp))
    return _DescribedConstraintSet(
        emap, NonnegativeOrthantCone(0),
        description={"kind": "tree", "parents": list(range(n)), "set": {"kind": "orthant"}})


def is_feasible(constraint: ConstraintSet, lam: np.ndarray, tol: float) -> bool:
    """Whether lambda >= -tol componentwise and A lambda is within tol of S."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (constraint.n,):
        raise InvalidStructureError(
            f"lambda has shape {lam.shape}, set lives in R^{constraint.n}")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if np.any(lam < -tol):
        return False
    t = constraint.edge_map.matvec(lam)
    dist = np.linalg.norm(t - project_simple(constraint.simple_set, t))
    return bool(dist <= tol)
