"""Bivariate angle-sweep kernels for halfspace, simplex-volume, and
simplex-containment depth.

All three classical combinatorial depths reduce, in the plane, to
statistics of the angles of the sample points around the query:

* halfspace count: ``min`` over closed halfplanes through the query of
  the number of samples they contain, computed as ``n - max`` over open
  semicircles of the angle count;
* simplex volume (pairs): the sum of ``|cross(v_i, v_j)|`` over pairs is a
  windowed sum over angular gaps smaller than a half turn;
* simplex containment (triples): a triple avoids the query exactly when
  its three angles fit inside an open semicircle, so non-containing
  triples can be counted from per-point window counts.

Each kernel evaluates many queries at once: angle computation and
sorting are vectorised across rows, the remaining O(n) bookkeeping per
query runs on row slices.  Samples coincident with the query are
handled separately (they belong to every closed halfplane and make
every simplex through them contain the query).

Angle comparisons use an absolute tolerance ``ANGLE_TOL`` so that
boundary configurations constructed from exact geometry (collinear or
antipodal points) are classified consistently; point sets whose angular
gaps around a query are smaller than the tolerance are outside the
supported precision.
"""

from __future__ import annotations

import numpy as np

ANGLE_TOL = 1e-9
TWO_PI = 2.0 * np.pi


def _angles_sorted(points: np.ndarray, queries: np.ndarray):
    """Sorted angles of ``points`` around each query.

    Returns ``(angles, order, m)`` where ``angles`` is (q, n) with the
    coincident entries replaced by ``+inf`` and each row sorted
    ascending, ``order`` is the per-row argsort (stable, so ties keep
    index order), and ``m`` the per-row count of non-coincident points.
    """
    diff = points[None, :, :] - queries[:, None, :]
    coincident = (diff[..., 0] == 0.0) & (diff[..., 1] == 0.0)
    ang = np.arctan2(diff[..., 1], diff[..., 0])
    np.add(ang, TWO_PI, out=ang, where=ang < 0.0)
    ang[coincident] = np.inf
    order = np.argsort(ang, axis=1, kind="stable")
    ang = np.take_along_axis(ang, order, axis=1)
    m = points.shape[0] - coincident.sum(axis=1)
    return ang, order, m


def halfspace_counts(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Minimal closed-halfplane count for each query (unnormalised depth)."""
    n = points.shape[0]
    ang, _, m = _angles_sorted(points, queries)
    out = np.empty(queries.shape[0], dtype=np.int64)
    for r in range(queries.shape[0]):
        mr = int(m[r])
        if mr == 0:
            out[r] = n
            continue
        a = ang[r, :mr]
        b = np.concatenate([a, a + TWO_PI])
        # occupancy of the open semicircle ending just past each angle:
        # counts of angles in (a_k - pi, a_k], wrap handled by doubling
        lo = np.searchsorted(b, a + np.pi + ANGLE_TOL, side="left")
        hi = np.searchsorted(b, a + TWO_PI + ANGLE_TOL, side="left")
        out[r] = (n - mr) + mr - int(np.max(hi - lo))
    return out


def pair_cross_sums(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Sum of |cross(x_i - q, x_j - q)| over all point pairs, per query.

    Half of this value is the total area of the triangles having the
    query as one vertex; pairs collinear with the query contribute zero.
    """
    diff_all = points[None, :, :] - queries[:, None, :]
    ang, order, m = _angles_sorted(points, queries)
    vx = np.take_along_axis(diff_all[..., 0], order, axis=1)
    vy = np.take_along_axis(diff_all[..., 1], order, axis=1)
    out = np.zeros(queries.shape[0])
    for r in range(queries.shape[0]):
        mr = int(m[r])
        if mr < 2:
            continue
        a = ang[r, :mr]
        b = np.concatenate([a, a + TWO_PI])
        px = np.concatenate([[0.0], np.cumsum(np.concatenate([vx[r, :mr], vx[r, :mr]]))])
        py = np.concatenate([[0.0], np.cumsum(np.concatenate([vy[r, :mr], vy[r, :mr]]))])
        # window (a_j - pi, a_j): partners ahead of j by less than a half
        # turn; exact half-turn or equal-angle partners contribute zero
        # cross product, so their inclusion is immaterial.
        lo = np.searchsorted(b, a + np.pi, side="right")
        hi = np.searchsorted(b, a + TWO_PI, side="left")
        sx = px[hi] - px[lo]
        sy = py[hi] - py[lo]
        out[r] = float(np.sum(vy[r, :mr] * sx - vx[r, :mr] * sy))
    return out


def containing_triple_counts(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Number of closed triangles (point triples) containing each query.

    A triple avoids the query iff some open halfplane through the query
    holds all three points, i.e. their angles fit in an open semicircle.
    Each avoiding triple is attributed to its first member in circular
    order (ties broken by sample index), giving an exact count without
    enumerating triples.
    """
    n = points.shape[0]
    total = n * (n - 1) * (n - 2) // 6
    ang, _, m = _angles_sorted(points, queries)
    out = np.empty(queries.shape[0], dtype=np.int64)
    for r in range(queries.shape[0]):
        mr = int(m[r])
        if mr < 3:
            out[r] = total
            continue
        a = ang[r, :mr]
        b = np.concatenate([a, a + TWO_PI])
        ub = np.searchsorted(a, a + ANGLE_TOL, side="left")
        lo = np.searchsorted(b, a + ANGLE_TOL, side="left")
        hi = np.searchsorted(b, a + np.pi - ANGLE_TOL, side="left")
        ties_after = ub - np.arange(mr) - 1
        c = (hi - lo) + ties_after
        escapes = int(np.sum(c * (c - 1) // 2))
        out[r] = total - escapes
    return out
