"""Elementary location statistics and linear-algebra helpers.

These are the building blocks the rest of the package composes: the
arithmetic mean, the coordinate-wise median and histogram mode (the two
naive baselines every benchmark includes), and symmetric
positive-definite inversion with an explicit singularity policy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import BadParameter, SingularScatter
from .validation import check_points

# Relative eigenvalue threshold below which a scatter matrix is treated
# as singular.  Kept in one place so every consumer fails identically.
SINGULARITY_RTOL = 1e-12


@dataclass(frozen=True)
class LocationScatter:
    """A location vector paired with a scatter (covariance-like) matrix."""

    location: np.ndarray
    scatter: np.ndarray

    def __post_init__(self):
        loc = np.asarray(self.location, dtype=float).reshape(-1)
        sca = np.asarray(self.scatter, dtype=float)
        d = loc.shape[0]
        if sca.shape != (d, d):
            raise BadParameter(f"scatter must be ({d}, {d}), got {sca.shape}")
        if not np.allclose(sca, sca.T, atol=1e-9, rtol=1e-9):
            raise BadParameter("scatter matrix must be symmetric")
        object.__setattr__(self, "location", loc)
        object.__setattr__(self, "scatter", sca)


def mean(points) -> np.ndarray:
    """Arithmetic mean of a point set, shape (d,)."""
    pts = check_points(points)
    return pts.mean(axis=0)


def covariance(points) -> np.ndarray:
    """Sample covariance (divisor n-1) of a point set, shape (d, d).

    A single point yields the zero matrix rather than dividing by zero.
    """
    pts = check_points(points)
    if pts.shape[0] == 1:
        return np.zeros((pts.shape[1], pts.shape[1]))
    centered = pts - pts.mean(axis=0)
    return centered.T @ centered / (pts.shape[0] - 1)


def coordinate_wise_median(points) -> np.ndarray:
    """Component-wise median; even counts use the midpoint of the two middle values."""
    pts = check_points(points)
    return np.median(pts, axis=0)


def coordinate_wise_mode(points, bin_width: float = 1.0) -> np.ndarray:
    """Component-wise histogram mode.

    Each coordinate is binned into half-open intervals
    ``[min + k*w, min + (k+1)*w)`` anchored at that coordinate's minimum;
    the centre of the most populated bin is returned.  Ties go to the
    lowest bin edge, so the result is deterministic.
    """
    pts = check_points(points)
    if not (bin_width > 0):
        raise BadParameter(f"bin_width must be positive, got {bin_width}")
    out = np.empty(pts.shape[1])
    for j in range(pts.shape[1]):
        col = pts[:, j]
        lo = col.min()
        idx = np.floor((col - lo) / bin_width).astype(np.int64)
        counts = np.bincount(idx)
        k = int(np.argmax(counts))  # argmax returns the first (lowest) maximal bin
        out[j] = lo + (k + 0.5) * bin_width
    return out


def spd_inverse(matrix) -> np.ndarray:
    """Inverse of a symmetric positive-definite matrix via eigendecomposition.

    Raises
    ------
    SingularScatter
        When the smallest eigenvalue is below ``SINGULARITY_RTOL`` times
        the largest (or non-positive), i.e. the matrix carries no usable
        inverse at working precision.
    """
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise BadParameter(f"matrix must be square, got shape {mat.shape}")
    if not np.allclose(mat, mat.T, atol=1e-9, rtol=1e-9):
        raise BadParameter("matrix must be symmetric")
    vals, vecs = np.linalg.eigh(mat)
    largest = vals[-1]
    if largest <= 0 or vals[0] < SINGULARITY_RTOL * largest:
        raise SingularScatter(
            f"matrix is numerically singular (eigenvalues {vals.min():.3e}..{largest:.3e})"
        )
    return (vecs / vals) @ vecs.T


def mahalanobis_squared(points, center, scatter) -> np.ndarray:
    """Squared Mahalanobis distances of each row of ``points`` from ``center``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    diff = pts - np.asarray(center, dtype=float).reshape(1, -1)
    inv = spd_inverse(scatter)
    return np.einsum("ni,ij,nj->n", diff, inv, diff)
