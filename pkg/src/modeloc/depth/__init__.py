"""Statistical depth functions and depth-based medians."""

from .functions import (
    DEPTH_NAMES,
    DepthMethod,
    as_depth_method,
    depth_all,
    depth_at,
    depth_many,
    spatial_median,
)
from .medians import deepest_index, depth_median

__all__ = [
    "DEPTH_NAMES",
    "DepthMethod",
    "as_depth_method",
    "deepest_index",
    "depth_all",
    "depth_at",
    "depth_many",
    "depth_median",
    "spatial_median",
]
