"""Statistical depth functions.

Seven notions of centrality are exposed behind one interface:

``tukey``
    Halfspace depth: minimal fraction of samples in a closed halfplane
    containing the query (exact, two-dimensional data only).
``oja``
    Simplex-volume depth ``1 / (1 + mean simplex volume)`` where the
    simplices are the triangles spanned by the query and every sample
    pair (exact, two-dimensional data only).
``liu``
    Simplicial depth: fraction of sample triples whose closed triangle
    contains the query (exact, two-dimensional data only).
``spatial``
    ``1 - || mean unit vector from the query to the samples ||``.
``l2``
    ``1 / (1 + covariance-weighted distance to the spatial median)``.
``mahalanobis``
    ``1 / (1 + squared Mahalanobis distance from the sample mean)``.
``projection``
    ``1 / (1 + sup directional outlyingness)`` with median/MAD
    outlyingness, the supremum approximated over a deterministic fan of
    directions plus sample-pair directions.

The three combinatorial depths are exact; ``projection`` is a
deterministic approximation whose direction count is configurable.
``depth_many`` evaluates arbitrary query points so that grid searches
and sample scoring share one code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import covariance, spd_inverse
from ..exceptions import BadParameter
from ..rng import RngStream
from ..validation import check_points
from . import _angular

DEPTH_NAMES = ("tukey", "oja", "liu", "spatial", "l2", "mahalanobis", "projection")
_PLANAR_ONLY = ("tukey", "oja", "liu")

# Declaring a projected query "on" a zero-MAD direction value tolerates
# this much absolute deviation.
_MAD_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class DepthMethod:
    """A depth function together with its approximation parameters.

    Parameters
    ----------
    name : str
        One of :data:`DEPTH_NAMES`.
    n_directions : int
        Number of deterministic directions for ``projection`` (ignored
        by the exact methods).  At least 8.
    max_pair_directions : int
        Cap on the number of sample-pair directions added for
        ``projection``; when the pair count exceeds the cap, a seeded
        subsample of pairs is used.
    simplex_subsample : int or None
        When set (>= 100), ``oja``/``liu`` are estimated from this many
        randomly drawn simplices instead of exact enumeration.
    """

    name: str
    n_directions: int = 180
    max_pair_directions: int = 256
    simplex_subsample: int | None = None

    def __post_init__(self):
        if self.name not in DEPTH_NAMES:
            raise BadParameter(f"unknown depth method {self.name!r}, expected one of {DEPTH_NAMES}")
        if self.n_directions < 8:
            raise BadParameter(f"n_directions must be >= 8, got {self.n_directions}")
        if self.max_pair_directions < 0:
            raise BadParameter("max_pair_directions must be >= 0")
        if self.simplex_subsample is not None and self.simplex_subsample < 100:
            raise BadParameter(f"simplex_subsample must be >= 100, got {self.simplex_subsample}")


def as_depth_method(method) -> DepthMethod:
    if isinstance(method, DepthMethod):
        return method
    return DepthMethod(str(method))


def spatial_median(points, tol: float = 1e-10, max_iter: int = 500) -> np.ndarray:
    """Geometric (spatial) median via damped Weiszfeld iterations.

    The update follows Vardi & Zhang's modification, which stays valid
    when an iterate lands exactly on a data point.
    """
    pts = check_points(points)
    y = pts.mean(axis=0)
    for _ in range(max_iter):
        diff = pts - y
        dist = np.linalg.norm(diff, axis=1)
        on_point = dist < 1e-14
        w = 1.0 / np.where(on_point, 1.0, dist)
        w[on_point] = 0.0
        wsum = w.sum()
        if wsum == 0.0:
            return y  # every sample coincides with the iterate
        t = (pts * w[:, None]).sum(axis=0) / wsum
        n_on = int(on_point.sum())
        if n_on:
            r = np.linalg.norm(((pts - y) * w[:, None]).sum(axis=0))
            if r < 1e-14:
                return y
            step = min(1.0, n_on / r)
            y_new = (1.0 - step) * t + step * y
        else:
            y_new = t
        if np.linalg.norm(y_new - y) <= tol * (1.0 + np.linalg.norm(y)):
            return y_new
        y = y_new
    return y


def _projection_directions(points: np.ndarray, method: DepthMethod, rng: RngStream) -> np.ndarray:
    n, d = points.shape
    if d == 2:
        t = np.arange(method.n_directions) * (np.pi / method.n_directions)
        dirs = np.column_stack([np.cos(t), np.sin(t)])
    else:
        g = rng.child(198).generator()
        raw = g.standard_normal((method.n_directions, d))
        dirs = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    if method.max_pair_directions > 0 and n >= 2:
        n_pairs = n * (n - 1) // 2
        if n_pairs <= method.max_pair_directions:
            ii, jj = np.triu_indices(n, k=1)
        else:
            ii, jj = _subsampled_pairs(n, method.max_pair_directions, rng.child(199).generator())
        pd = points[jj] - points[ii]
        norms = np.linalg.norm(pd, axis=1)
        keep = norms > 0
        if np.any(keep):
            dirs = np.vstack([dirs, pd[keep] / norms[keep, None]])
    return dirs


def _projection_outlyingness(points, queries, method, rng):
    dirs = _projection_directions(points, method, rng)
    proj = points @ dirs.T
    med = np.median(proj, axis=0)
    mad = np.median(np.abs(proj - med), axis=0)
    qproj = np.abs(queries @ dirs.T - med)
    out = np.empty(queries.shape[0])
    zero = mad <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = qproj[:, ~zero] / mad[~zero]
    sup = ratio.max(axis=1) if ratio.shape[1] else np.zeros(queries.shape[0])
    if np.any(zero):
        off_value = (qproj[:, zero] > _MAD_ZERO_TOL).any(axis=1)
        sup = np.where(off_value, np.inf, sup)
    out[:] = sup
    return out


def _subsampled_pairs(n, count, g):
    # draw distinct (i < j) index pairs by inverting the row-major
    # enumeration of the strict upper triangle
    n_pairs = n * (n - 1) // 2
    take = min(count, n_pairs)
    flat = g.choice(n_pairs, size=take, replace=False)
    ii = (n - 2 - np.floor(np.sqrt(-8.0 * flat + 4.0 * n * (n - 1) - 7.0) / 2.0 - 0.5)).astype(np.int64)
    jj = (flat + ii + 1 - n * (n - 1) // 2 + (n - ii) * ((n - ii) - 1) // 2).astype(np.int64)
    return ii, jj


def _hull_contains(points: np.ndarray, q: np.ndarray) -> bool:
    # degenerate fallback for < 3 points: point or segment membership
    if points.shape[0] == 1:
        return bool(np.all(points[0] == q))
    a, b = points[0], points[-1]
    cross = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
    if abs(cross) > 1e-12:
        return False
    lo = np.minimum(a, b) - 1e-12
    hi = np.maximum(a, b) + 1e-12
    return bool(np.all(q >= lo) and np.all(q <= hi))


def depth_many(points, queries, method="tukey", rng: RngStream | None = None) -> np.ndarray:
    """Depth of each query point with respect to ``points``.

    Parameters
    ----------
    points : array-like (n, d)
        Reference sample.
    queries : array-like (q, d)
        Points whose depth is evaluated (need not belong to the sample).
    method : str or DepthMethod
    rng : RngStream, optional
        Consumed only by approximate paths (projection pair subsampling,
        random directions for d > 2, simplex subsampling).  Defaults to
        a fixed stream so results are reproducible by default.

    Returns
    -------
    ndarray (q,) of depths in [0, 1].
    """
    method = as_depth_method(method)
    pts = check_points(points)
    qry = check_points(queries, name="queries")
    if qry.shape[1] != pts.shape[1]:
        raise BadParameter("queries and points must share the same dimension")
    if rng is None:
        rng = RngStream(0)
    n, d = pts.shape

    if method.name in _PLANAR_ONLY:
        if d != 2:
            raise BadParameter(f"{method.name} depth is implemented for 2-d data only, got d={d}")
        return _planar_depth(pts, qry, method, rng)

    if method.name == "mahalanobis":
        mu = pts.mean(axis=0)
        inv = spd_inverse(covariance(pts)) if n > 1 else None
        if inv is None:
            same = np.all(qry == pts[0], axis=1)
            return np.where(same, 1.0, 0.0)
        diff = qry - mu
        d2 = np.einsum("ni,ij,nj->n", diff, inv, diff)
        return 1.0 / (1.0 + d2)

    if method.name == "spatial":
        out = np.empty(qry.shape[0])
        for start in range(0, qry.shape[0], 512):
            block = qry[start:start + 512]
            diff = pts[None, :, :] - block[:, None, :]
            dist = np.linalg.norm(diff, axis=2)
            np.divide(diff, dist[:, :, None], out=diff, where=dist[:, :, None] > 0)
            diff[dist == 0] = 0.0
            out[start:start + 512] = 1.0 - np.linalg.norm(diff.mean(axis=1), axis=1)
        return out

    if method.name == "l2":
        center = spatial_median(pts)
        inv = spd_inverse(covariance(pts)) if n > 1 else np.eye(d)
        diff = qry - center
        d2 = np.einsum("ni,ij,nj->n", diff, inv, diff)
        return 1.0 / (1.0 + np.sqrt(np.maximum(d2, 0.0)))

    # projection
    sup = _projection_outlyingness(pts, qry, method, rng)
    with np.errstate(divide="ignore"):
        return np.where(np.isinf(sup), 0.0, 1.0 / (1.0 + sup))


def _planar_depth(pts, qry, method, rng):
    n = pts.shape[0]
    if method.name == "tukey":
        return halfspace_counts_exact(pts, qry) / float(n)
    if method.name == "oja":
        if method.simplex_subsample is not None and n >= 2:
            g = rng.child(197).generator()
            ii, jj = _subsampled_pairs(n, method.simplex_subsample, g)
            vols = np.empty(qry.shape[0])
            for r, q in enumerate(qry):
                a = pts[ii] - q
                b = pts[jj] - q
                vols[r] = np.mean(np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])) / 2.0
            return 1.0 / (1.0 + vols)
        n_pairs = n * (n - 1) / 2.0
        if n_pairs == 0:
            return np.ones(qry.shape[0])
        sums = _angular.pair_cross_sums(pts, qry)
        return 1.0 / (1.0 + sums / 2.0 / n_pairs)
    # liu
    if method.simplex_subsample is not None and n >= 3:
        g = rng.child(196).generator()
        counts = np.zeros(qry.shape[0])
        m = method.simplex_subsample
        idx = np.array([sorted(g.choice(n, size=3, replace=False)) for _ in range(m)])
        tri = pts[idx]  # (m, 3, 2)
        for r, q in enumerate(qry):
            counts[r] = np.sum(_triangles_contain(tri, q))
        return counts / float(m)
    total = n * (n - 1) * (n - 2) // 6
    if total == 0:
        return np.array([1.0 if _hull_contains(pts, q) else 0.0 for q in qry])
    return _angular.containing_triple_counts(pts, qry) / float(total)


def _cross2(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _triangles_contain(tri, q):
    # closed containment, degenerate triangles reduce to segment tests
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    s1 = _cross2(b - a, q - a)
    s2 = _cross2(c - b, q - b)
    s3 = _cross2(a - c, q - c)
    inside = ((s1 >= 0) & (s2 >= 0) & (s3 >= 0)) | ((s1 <= 0) & (s2 <= 0) & (s3 <= 0))
    area = np.abs(_cross2(b - a, c - a))
    degen = area <= 0
    if np.any(degen):
        for k in np.nonzero(degen)[0]:
            seg = False
            for p1, p2 in ((a[k], b[k]), (b[k], c[k]), (c[k], a[k])):
                if _hull_contains(np.array([p1, p2]), q):
                    seg = True
                    break
            inside[k] = seg
    return inside


def halfspace_counts_exact(pts, qry) -> np.ndarray:
    """Unnormalised halfspace depth counts (exposed for reuse in tests)."""
    return _angular.halfspace_counts(pts, qry)


def depth_all(points, method="tukey", rng: RngStream | None = None) -> np.ndarray:
    """Depth of every sample with respect to the full sample (self included)."""
    pts = check_points(points)
    return depth_many(pts, pts, method, rng)


def depth_at(points, query, method="tukey", rng: RngStream | None = None) -> float:
    """Depth of one query point; see :func:`depth_many`."""
    pts = check_points(points)
    q = np.asarray(query, dtype=float).reshape(1, -1)
    return float(depth_many(pts, q, method, rng)[0])
