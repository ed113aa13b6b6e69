"""Input validation helpers used across estimators and pipeline stages."""

from __future__ import annotations

import numpy as np

from .exceptions import BadParameter, EmptyInput, InsufficientSamples


def check_points(points, min_samples: int = 1, name: str = "points") -> np.ndarray:
    """Validate and return a point set as a float64 array of shape (n, d).

    Requirements: two-dimensional array layout, d >= 2, every value
    finite, and at least ``min_samples`` rows.  A copy is only made when
    dtype or contiguity forces one.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2:
        raise BadParameter(f"{name} must be a 2-d array of shape (n, d), got ndim={arr.ndim}")
    n, d = arr.shape
    if n == 0:
        raise EmptyInput(f"{name} is empty")
    if d < 2:
        raise BadParameter(f"{name} must have dimension >= 2, got d={d}")
    if not np.all(np.isfinite(arr)):
        raise BadParameter(f"{name} contains non-finite values")
    if n < min_samples:
        raise InsufficientSamples(f"{name} has {n} samples, need at least {min_samples}")
    return arr


def check_point(point, d: int, name: str = "point") -> np.ndarray:
    """Validate a single query point of dimension ``d``."""
    arr = np.asarray(point, dtype=float).reshape(-1)
    if arr.shape[0] != d:
        raise BadParameter(f"{name} must have dimension {d}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise BadParameter(f"{name} contains non-finite values")
    return arr


def check_fraction(value, name: str, low: float = 0.0, high: float = 1.0,
                   inclusive_low: bool = False, inclusive_high: bool = True) -> float:
    """Validate a scalar fraction in (low, high] by default."""
    value = float(value)
    ok_low = value >= low if inclusive_low else value > low
    ok_high = value <= high if inclusive_high else value < high
    if not (ok_low and ok_high):
        lo_b = "[" if inclusive_low else "("
        hi_b = "]" if inclusive_high else ")"
        raise BadParameter(f"{name} must lie in {lo_b}{low}, {high}{hi_b}, got {value}")
    return value
