"""Orthonormal 2D Haar transform and its quadtree coefficient structure.

Coefficients use the standard pyramid layout: the coarsest scale sits
at the top-left corner and each detail coefficient has four children in
the same subband one level finer.  The resulting rooted tree (root =
coarsest coefficient) is what the conic constraint set runs on.
"""

from __future__ import annotations

import numpy as np

from .sets import EdgeMap, tree_edge_map

_SQRT2 = np.sqrt(2.0)


def _check_side(side: int) -> None:
    if side < 1 or side & (side - 1):
        raise ValueError(f"image side must be a power of two, got {side}")


def haar2d(image: np.ndarray) -> np.ndarray:
    """Full orthonormal 2D Haar decomposition of a square image."""
    image = np.asarray(image, dtype=float)
    if image.ndim != 2 or image.shape[0] != image.shape[1]:
        raise ValueError("image must be square")
    side = image.shape[0]
    _check_side(side)
    out = image.copy()
    s = side
    while s > 1:
        block = out[:s, :s]
        # rows then columns: pairwise average/difference, 1/sqrt(2) scaling
        lo = (block[:, 0::2] + block[:, 1::2]) / _SQRT2
        hi = (block[:, 0::2] - block[:, 1::2]) / _SQRT2
        block = np.hstack([lo, hi])
        lo = (block[0::2, :] + block[1::2, :]) / _SQRT2
        hi = (block[0::2, :] - block[1::2, :]) / _SQRT2
        out[:s, :s] = np.vstack([lo, hi])
        s //= 2
    return out


def ihaar2d(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`haar2d`."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 2 or coeffs.shape[0] != coeffs.shape[1]:
        raise ValueError("coefficient array must be square")
    side = coeffs.shape[0]
    _check_side(side)
    out = coeffs.copy()
    s = 2
    while s <= side:
        block = out[:s, :s].copy()
        h = s // 2
        rec = np.empty((s, s))
        rec[0::2, :] = (block[:h, :] + block[h:, :]) / _SQRT2
        rec[1::2, :] = (block[:h, :] - block[h:, :]) / _SQRT2
        block = rec
        rec = np.empty((s, s))
        rec[:, 0::2] = (block[:, :h] + block[:, h:]) / _SQRT2
        rec[:, 1::2] = (block[:, :h] - block[:, h:]) / _SQRT2
        out[:s, :s] = rec
        s *= 2
    return out


def quadtree_parents(side: int) -> np.ndarray:
    """Parent-index array over flattened Haar coefficients.

    The root (coarsest coefficient) is its own parent; the three
    coarsest details hang off the root; every other detail's parent is
    the coefficient one level coarser in the same subband.
    """
    _check_side(side)
    parents = np.arange(side * side, dtype=np.intp)

    def flat(i, j):
        return i * side + j

    if side >= 2:
        for (i, j) in ((0, 1), (1, 0), (1, 1)):
            parents[flat(i, j)] = flat(0, 0)
    s = 2
    while s < side:
        for (orow, ocol) in ((0, s), (s, 0), (s, s)):
            for i in range(s):
                for j in range(s):
                    parents[flat(orow + i, ocol + j)] = flat(orow // 2 + i // 2,
                                                             ocol // 2 + j // 2)
        s *= 2
    return parents


def make_piecewise_constant_image(side: int, rng: np.random.Generator,
                                  n_rects: int = 2) -> np.ndarray:
    """Synthetic piecewise-constant test image: rectangles on a flat background."""
    _check_side(side)
    image = np.zeros((side, side))
    for _ in range(n_rects):
        h = int(rng.integers(side // 4, side // 2 + 1))
        w = int(rng.integers(side // 4, side // 2 + 1))
        r = int(rng.integers(0, side - h + 1))
        c = int(rng.integers(0, side - w + 1))
        image[r:r + h, c:c + w] = float(rng.integers(1, 5))
    return image


def haar_tree_setup(side: int, rng: np.random.Generator) -> tuple[np.ndarray, EdgeMap]:
    """Wavelet coefficients of a synthetic image plus their quadtree edge map."""
    if side not in (8, 16, 32):
        raise ValueError(f"desk-scale sides are 8, 16 or 32, got {side}")
    image = make_piecewise_constant_image(side, rng)
    beta_star = haar2d(image).ravel()
    tree = tree_edge_map(quadtree_parents(side))
    return beta_star, tree
