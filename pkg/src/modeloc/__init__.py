"""modeloc: robust multivariate mode location for gaze-style point clouds.

The package combines three building blocks:

* data depth functions and depth-based medians (:mod:`modeloc.depth`),
* robust location/scatter minimisers (:mod:`modeloc.robust`),
* unimodality and normality tests (:mod:`modeloc.stattests`),

into a bootstrap / refine / iterate pipeline (:mod:`modeloc.bril`) that
locates the dominant mode of a contaminated multimodal sample.  A
scikit-learn style estimator front end lives in
:mod:`modeloc.estimators`, and synthetic benchmark tooling in
:mod:`modeloc.synthgen` and :mod:`modeloc.evaluation`.
"""

from .exceptions import (
    BadParameter,
    DegenerateData,
    EmptyInput,
    EstimationError,
    InputError,
    InsufficientSamples,
    MissingGroundTruth,
    ModeLocError,
    PlacementFailed,
    SingularScatter,
    UnsortedInput,
)
from .rng import RngStream, as_stream

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ModeLocError",
    "InputError",
    "EstimationError",
    "EmptyInput",
    "InsufficientSamples",
    "BadParameter",
    "UnsortedInput",
    "MissingGroundTruth",
    "SingularScatter",
    "DegenerateData",
    "PlacementFailed",
    "RngStream",
    "as_stream",
]
