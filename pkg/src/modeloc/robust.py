"""Robust location/scatter by subset search: MCD and MVE.

Both estimators look for the ``h``-point subset whose spread is
smallest and report that subset's mean and covariance:

* ``mcd`` minimises the determinant of the subset covariance using the
  standard fast algorithm: random ``(d+1)``-point seeds, followed by
  concentration steps (re-ordering all points by Mahalanobis distance
  to the current subset estimate and keeping the ``h`` closest), which
  provably never increase the determinant.  All starts are advanced a
  couple of steps, then only the most promising few are run to
  convergence.
* ``mve`` minimises the volume of an ellipsoid covering ``h`` points,
  approximated by inflating the covariance ellipsoid of random
  ``(d+1)``-point subsets until it covers ``h`` points.

No consistency or reweighting correction is applied; callers get the
raw subset mean and covariance together with the subset indices.  All
candidate orderings break ties by sample index, so results are
reproducible bit-for-bit for a fixed random stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LocationScatter, mahalanobis_squared
from .exceptions import BadParameter, DegenerateData, InsufficientSamples
from .rng import RngStream
from .validation import check_points

# Relative determinant threshold below which a subset covariance is
# treated as rank deficient (scale-aware: compared to (trace/d)^d).
_DET_RTOL = 1e-12


@dataclass(frozen=True)
class MinimizerConfig:
    """Search-effort knobs shared by :func:`mcd` and :func:`mve`.

    ``n_starts`` random seeds are drawn; for MCD each runs
    ``shortlist_steps`` concentration steps before the ``keep_best``
    lowest-determinant candidates continue to convergence (at most
    ``max_c_steps`` steps in total).
    """

    n_starts: int = 500
    max_c_steps: int = 50
    shortlist_steps: int = 2
    keep_best: int = 10

    def __post_init__(self):
        if self.n_starts < 1:
            raise BadParameter("n_starts must be >= 1")
        if self.max_c_steps < 1:
            raise BadParameter("max_c_steps must be >= 1")
        if self.shortlist_steps < 1 or self.keep_best < 1:
            raise BadParameter("shortlist_steps and keep_best must be >= 1")


def default_h(n: int, d: int) -> int:
    """Default subset size: ceil((n + d + 1) / 2)."""
    return math.ceil((n + d + 1) / 2)


def _batched_dets(covs):
    if covs.shape[-1] == 2:
        return covs[:, 0, 0] * covs[:, 1, 1] - covs[:, 0, 1] * covs[:, 1, 0]
    return np.linalg.det(covs)


def _batched_inv(covs, dets):
    if covs.shape[-1] == 2:
        inv = np.empty_like(covs)
        inv[:, 0, 0] = covs[:, 1, 1]
        inv[:, 1, 1] = covs[:, 0, 0]
        inv[:, 0, 1] = -covs[:, 0, 1]
        inv[:, 1, 0] = -covs[:, 1, 0]
        return inv / dets[:, None, None]
    return np.linalg.inv(covs)


def _subset_stats(pts, support):
    sub = pts[support]  # (s, k, d)
    means = sub.mean(axis=1)
    centered = sub - means[:, None, :]
    covs = centered.transpose(0, 2, 1) @ centered / (support.shape[1] - 1)
    return means, covs


def _singular_mask(covs, dets):
    d = covs.shape[-1]
    scale = np.trace(covs, axis1=1, axis2=2) / d
    floor = np.where(scale > 0, (_DET_RTOL * scale) ** d, 0.0)
    return ~(dets > floor)


def _distances(pts, means, covs, dets):
    inv = _batched_inv(covs, dets)
    diff = pts[None, :, :] - means[:, None, :]
    return np.einsum("snd,sde,sne->sn", diff, inv, diff)


def mcd(points, h: int | None = None, config: MinimizerConfig | None = None,
        rng: RngStream | None = None):
    """Minimum covariance determinant subset.

    Returns
    -------
    (LocationScatter, ndarray)
        Mean/covariance of the best subset and its sorted indices.

    Raises
    ------
    DegenerateData
        If every random start yields a rank-deficient seed covariance.
    """
    pts = check_points(points)
    n, d = pts.shape
    cfg = config or MinimizerConfig()
    if h is None:
        h = default_h(n, d)
    if n < d + 1:
        raise InsufficientSamples(f"need at least d+1={d + 1} samples, got {n}")
    if not (d + 1 <= h <= n):
        raise BadParameter(f"h must lie in [{d + 1}, {n}], got {h}")
    if h == n:
        idx = np.arange(n)
        means, covs = _subset_stats(pts, idx[None, :])
        return LocationScatter(means[0], covs[0]), idx

    g = (rng or RngStream(0)).generator()
    seeds = np.empty((cfg.n_starts, d + 1), dtype=np.int64)
    for s in range(cfg.n_starts):
        seeds[s] = g.choice(n, size=d + 1, replace=False)

    means, covs = _subset_stats(pts, seeds)
    dets = _batched_dets(covs)
    dead = _singular_mask(covs, dets)
    if np.all(dead):
        raise DegenerateData("all MCD starts produced singular seed covariances")
    # starts whose seed is already rank-deficient never receive a valid
    # h-subset, so they must not win the determinant race
    dets[dead] = np.inf

    support = np.empty((cfg.n_starts, h), dtype=np.int64)
    support[:] = np.arange(h)
    live = ~dead
    steps_done = 0

    def c_step(active, check_monotone):
        nonlocal means, covs, dets, live
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            return
        d2 = _distances(pts, means[idx], covs[idx], dets[idx])
        order = np.argsort(d2, axis=1, kind="stable")[:, :h]
        # canonical member order: a subset re-selected at a fixed point
        # then reproduces bitwise-identical statistics
        order.sort(axis=1)
        support[idx] = order
        m, c = _subset_stats(pts, order)
        means[idx], covs[idx] = m, c
        new_dets = _batched_dets(c)
        if check_monotone:
            # the concentration theorem guarantees non-increasing
            # determinants between same-size subsets; near rank
            # deficiency the determinant is pure cancellation, so allow
            # the summation noise floor on top of the relative slack
            scale = np.trace(c, axis1=1, axis2=2) / d
            slack = 16 * d * h * np.finfo(float).eps * np.maximum(scale, 0.0) ** d
            if np.any(new_dets > dets[idx] * (1 + 1e-9) + slack + 1e-300):
                raise AssertionError("concentration step increased the determinant")
        dets[idx] = new_dets
        newly_dead = _singular_mask(c, new_dets)
        live[idx] = ~newly_dead

    # short advance of every start, then converge only a shortlist;
    # the very first step reorders around the (d+1)-point seed, for
    # which the monotonicity guarantee does not yet apply
    for _ in range(cfg.shortlist_steps):
        c_step(live, check_monotone=steps_done >= 1)
        steps_done += 1

    ranked = np.argsort(dets, kind="stable")
    shortlist = np.zeros(cfg.n_starts, dtype=bool)
    shortlist[ranked[: cfg.keep_best]] = True
    active = shortlist & live
    while steps_done < cfg.max_c_steps and np.any(active):
        before = dets.copy()
        c_step(active, check_monotone=True)
        steps_done += 1
        improved = before[active] - dets[active] > 1e-12 * np.maximum(before[active], 1e-300)
        still = np.zeros(cfg.n_starts, dtype=bool)
        still[np.nonzero(active)[0][improved]] = True
        active = still & live

    dets[np.isnan(dets)] = np.inf
    best = int(np.argmin(np.where(shortlist, dets, np.inf)))
    subset = np.sort(support[best])
    mean_best, cov_best = _subset_stats(pts, subset[None, :])
    return LocationScatter(mean_best[0], cov_best[0]), subset


def mve(points, h: int | None = None, config: MinimizerConfig | None = None,
        rng: RngStream | None = None):
    """Minimum volume ellipsoid subset (resampling approximation).

    Each random ``(d+1)``-point subset defines an ellipsoid shape; it is
    inflated until it covers ``h`` points and the candidate with the
    smallest covering volume wins.  Returns the covered subset's mean,
    covariance and sorted indices.
    """
    pts = check_points(points)
    n, d = pts.shape
    cfg = config or MinimizerConfig()
    if h is None:
        h = default_h(n, d)
    if n < d + 1:
        raise InsufficientSamples(f"need at least d+1={d + 1} samples, got {n}")
    if not (d + 1 <= h <= n):
        raise BadParameter(f"h must lie in [{d + 1}, {n}], got {h}")
    if h == n:
        idx = np.arange(n)
        means, covs = _subset_stats(pts, idx[None, :])
        return LocationScatter(means[0], covs[0]), idx

    g = (rng or RngStream(0)).generator()
    seeds = np.empty((cfg.n_starts, d + 1), dtype=np.int64)
    for s in range(cfg.n_starts):
        seeds[s] = g.choice(n, size=d + 1, replace=False)

    means, covs = _subset_stats(pts, seeds)
    dets = _batched_dets(covs)
    dead = _singular_mask(covs, dets)
    if np.all(dead):
        raise DegenerateData("all MVE starts produced singular seed covariances")

    idx = np.nonzero(~dead)[0]
    d2 = _distances(pts, means[idx], covs[idx], dets[idx])
    order = np.argsort(d2, axis=1, kind="stable")
    m2 = np.take_along_axis(d2, order[:, h - 1 : h], axis=1)[:, 0]
    # volume^2 of the inflated ellipsoid, up to the unit-ball constant
    objective = (m2 ** d) * dets[idx]
    best_local = int(np.argmin(objective))
    subset = np.sort(order[best_local, :h])
    sub_pts = pts[subset]
    centered = sub_pts - sub_pts.mean(axis=0)
    cov = centered.T @ centered / (h - 1)
    return LocationScatter(sub_pts.mean(axis=0), cov), subset


def robust_distances(points, estimate: LocationScatter) -> np.ndarray:
    """Mahalanobis-type distances sqrt((x-T)' C^-1 (x-T)) per sample."""
    pts = check_points(points)
    d2 = mahalanobis_squared(pts, estimate.location, estimate.scatter)
    return np.sqrt(np.maximum(d2, 0.0))
