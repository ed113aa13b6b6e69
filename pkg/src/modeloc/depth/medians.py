"""Location estimators built on depth maximisation.

Three strategies share the interface ``depth_median(points, method,
strategy, ...)``:

``max``
    The deepest sample point; ties resolved to the smallest index.
``sup``
    Recomputes depths within the top-``fraction`` deepest samples and
    returns the deepest sample of that subset.
``med``
    A grid search over the data bounding box (64 x 64 cells, sample
    positions included as extra candidates), refined twice around the
    incumbent.  Counting depths plateau on regions of maximal depth, so
    the final answer is the centroid of the maximising grid points,
    which tracks the barycentre of the deepest region.
"""

from __future__ import annotations

import math

import numpy as np

from ..exceptions import BadParameter
from ..rng import RngStream
from ..validation import check_fraction, check_points
from .functions import as_depth_method, depth_all, depth_many

_GRID = 64


def deepest_index(depths: np.ndarray) -> int:
    """Index of the maximal depth; the first one when tied."""
    return int(np.argmax(depths))


def depth_median(points, method="tukey", strategy: str = "max",
                 fraction: float = 0.1, rng: RngStream | None = None) -> np.ndarray:
    """Depth-based central location of a point set.

    Parameters
    ----------
    points : array-like (n, d)
    method : str or DepthMethod
    strategy : {"max", "sup", "med"}
    fraction : float
        Top fraction of samples kept by the ``sup`` strategy.
    rng : RngStream, optional
        Forwarded to approximate depth computations.
    """
    pts = check_points(points)
    method = as_depth_method(method)
    if rng is None:
        rng = RngStream(0)
    if strategy == "max":
        return pts[deepest_index(depth_all(pts, method, rng))].copy()
    if strategy == "sup":
        fraction = check_fraction(fraction, "fraction")
        depths = depth_all(pts, method, rng)
        k = max(1, math.ceil(fraction * pts.shape[0]))
        order = np.argsort(-depths, kind="stable")[:k]
        sub = pts[np.sort(order)]
        return sub[deepest_index(depth_all(sub, method, rng))].copy()
    if strategy == "med":
        return _grid_maximiser(pts, method, rng)
    raise BadParameter(f"unknown strategy {strategy!r}, expected max, sup or med")


def _grid_axes(box_lo, box_hi, g):
    return [np.linspace(box_lo[j], box_hi[j], g) for j in range(len(box_lo))]


def _grid_points(axes):
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def _grid_maximiser(pts, method, rng):
    d = pts.shape[1]
    # keep the candidate budget near 64 x 64 regardless of dimension
    g = _GRID if d == 2 else max(8, int(round(4096 ** (1.0 / d))))
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    candidates = _grid_points(_grid_axes(lo, lo + span, g))
    # sample positions seed the search so isolated deep samples are not
    # missed by the coarse grid
    candidates = np.vstack([candidates, pts])
    cell = span / (g - 1)

    best_points = candidates[:1]
    for stage in range(3):  # initial pass plus two refinements
        depths = depth_many(pts, candidates, method, rng)
        top = depths.max()
        best_points = candidates[depths >= top - 1e-15]
        if stage == 2:
            break
        box_lo = best_points.min(axis=0) - cell
        box_hi = best_points.max(axis=0) + cell
        candidates = _grid_points(_grid_axes(box_lo, box_hi, g))
        cell = (box_hi - box_lo) / (g - 1)
    return best_points.mean(axis=0)
