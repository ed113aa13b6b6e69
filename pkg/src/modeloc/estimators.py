"""Estimator objects with a scikit-learn style interface.

Every locator follows the ``fit(X) -> self`` protocol and exposes the
found mode as ``location_``.  Constructor arguments are plain values
(so ``get_params`` / ``set_params`` / ``clone`` work), and randomness
is controlled by ``random_state``, which accepts an int or an
:class:`~modeloc.rng.RngStream`.

:func:`make_estimator` builds a locator from a compact spec string,
``family[:method[:param]]``::

    mean                 arithmetic mean
    cw-median            coordinate-wise median
    cw-mode[:width]      coordinate-wise histogram mode
    med:<depth>          depth median (grid maximiser)
    max:<depth>          deepest sample
    sup:<depth>[:frac]   deepest sample among the top ``frac`` samples
    rec:<method>         recursive trimming seed (depth or mcd/mve)
    brl:<method>         bootstrap + refine
    bril:<method>        full iterated pipeline

``<depth>`` is one of tukey, oja, liu, spatial, l2, mahalanobis,
projection; ``<method>`` additionally admits mcd and mve.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import bril as _bril
from . import core
from .depth import DEPTH_NAMES, depth_median
from .exceptions import BadParameter
from .rng import as_stream
from .validation import check_points

BOOTSTRAP_NAMES = DEPTH_NAMES + ("mcd", "mve")


class BaseLocator(BaseEstimator):
    """Shared fitting shell: validate, locate, store ``location_``."""

    def fit(self, X, y=None):
        X = check_points(X, min_samples=1, name="X")
        self.location_ = self._locate(X)
        self.n_features_in_ = X.shape[1]
        return self

    def fit_predict(self, X, y=None):
        self.fit(X)
        return self.labels_ if hasattr(self, "labels_") else np.zeros(len(X), dtype=int)

    def _locate(self, X):  # pragma: no cover - abstract
        raise NotImplementedError


class MeanLocator(BaseLocator):
    def _locate(self, X):
        return core.mean(X)


class CoordinateWiseMedianLocator(BaseLocator):
    def _locate(self, X):
        return core.coordinate_wise_median(X)


class CoordinateWiseModeLocator(BaseLocator):
    def __init__(self, bin_width=1.0):
        self.bin_width = bin_width

    def _locate(self, X):
        return core.coordinate_wise_mode(X, bin_width=self.bin_width)


class DepthMedianLocator(BaseLocator):
    """Depth median (strategy "med"), deepest sample ("max"), or the
    deepest of the top-``fraction`` samples ("sup")."""

    def __init__(self, method="tukey", strategy="med", fraction=0.1, random_state=None):
        self.method = method
        self.strategy = strategy
        self.fraction = fraction
        self.random_state = random_state

    def _locate(self, X):
        return depth_median(X, self.method, strategy=self.strategy,
                            fraction=self.fraction, rng=as_stream(self.random_state))


class RecursiveTrimLocator(BaseLocator):
    """Seed stage on its own: recursive depth or MCD/MVE trimming."""

    def __init__(self, method="tukey", trim_fraction=0.5, min_size=None, random_state=None):
        self.method = method
        self.trim_fraction = trim_fraction
        self.min_size = min_size
        self.random_state = random_state

    def _bootstrap_method(self):
        base = _bril.as_bootstrap_method(self.method)
        return _bril.BootstrapMethod(kind=base.kind, depth=base.depth,
                                     trim_fraction=self.trim_fraction,
                                     min_size=self.min_size)

    def _locate(self, X):
        return _bril.bootstrap(X, self._bootstrap_method(),
                               rng=as_stream(self.random_state))


class BRLLocator(RecursiveTrimLocator):
    """Bootstrap + unimodality/normality refinement (single shot)."""

    def __init__(self, method="tukey", trim_fraction=0.5, min_size=None,
                 test="mardia", alpha=0.05, random_state=None):
        super().__init__(method, trim_fraction, min_size, random_state)
        self.test = test
        self.alpha = alpha

    def _locate(self, X):
        center, members = _bril.brl(X, self._bootstrap_method(), test=self.test,
                                    alpha=self.alpha, rng=as_stream(self.random_state))
        self.members_ = members
        return center


class BRILLocator(RecursiveTrimLocator):
    """Full pipeline; exposes the group decomposition after fitting.

    Fitted attributes: ``location_``, ``estimate_`` (the full result),
    ``groups_``, ``selected_index_``, ``unassigned_`` and per-sample
    ``labels_`` (group index, -1 for unassigned).
    """

    def __init__(self, method="tukey", trim_fraction=0.5, min_size=None,
                 test="mardia", alpha=0.05, random_state=None):
        super().__init__(method, trim_fraction, min_size, random_state)
        self.test = test
        self.alpha = alpha

    def _locate(self, X):
        est = _bril.bril(X, self._bootstrap_method(), test=self.test,
                         alpha=self.alpha, rng=as_stream(self.random_state))
        self.estimate_ = est
        self.groups_ = est.groups
        self.selected_index_ = est.selected_index
        self.unassigned_ = est.unassigned
        labels = np.full(len(X), -1, dtype=int)
        for gi, group in enumerate(est.groups):
            labels[group.members] = gi
        self.labels_ = labels
        return est.center


def _parse_fraction(token, name):
    try:
        value = float(token)
    except ValueError:
        raise BadParameter(f"{name} expects a number, got {token!r}") from None
    return value


def make_estimator(spec: str) -> BaseLocator:
    """Build a locator from a ``family[:method[:param]]`` spec string."""
    if not isinstance(spec, str) or not spec.strip():
        raise BadParameter("estimator spec must be a non-empty string")
    parts = [p.strip().lower() for p in spec.strip().split(":")]
    family, args = parts[0], parts[1:]

    def need_method(valid):
        if not args:
            raise BadParameter(f"estimator {family!r} needs a method, one of {', '.join(valid)}")
        if args[0] not in valid:
            raise BadParameter(
                f"unknown method {args[0]!r} for {family!r}; valid: {', '.join(valid)}")
        return args[0]

    if family == "mean":
        est = MeanLocator()
        extra = args
    elif family == "cw-median":
        est = CoordinateWiseMedianLocator()
        extra = args
    elif family == "cw-mode":
        width = _parse_fraction(args[0], "cw-mode width") if args else 1.0
        est = CoordinateWiseModeLocator(bin_width=width)
        extra = args[1:]
    elif family in ("med", "max"):
        method = need_method(DEPTH_NAMES)
        est = DepthMedianLocator(method=method, strategy=family)
        extra = args[1:]
    elif family == "sup":
        method = need_method(DEPTH_NAMES)
        fraction = _parse_fraction(args[1], "sup fraction") if len(args) > 1 else 0.1
        est = DepthMedianLocator(method=method, strategy="sup", fraction=fraction)
        extra = args[2:]
    elif family == "rec":
        est = RecursiveTrimLocator(method=need_method(BOOTSTRAP_NAMES))
        extra = args[1:]
    elif family == "brl":
        est = BRLLocator(method=need_method(BOOTSTRAP_NAMES))
        extra = args[1:]
    elif family == "bril":
        est = BRILLocator(method=need_method(BOOTSTRAP_NAMES))
        extra = args[1:]
    else:
        raise BadParameter(
            f"unknown estimator family {family!r}; valid: mean, cw-median, cw-mode, "
            "med, max, sup, rec, brl, bril")
    if extra:
        raise BadParameter(f"trailing tokens {extra} in estimator spec {spec!r}")
    return est


def locate(spec: str, points, random_state=None) -> np.ndarray:
    """One-call convenience: build, seed, fit, return the location."""
    est = make_estimator(spec)
    if "random_state" in est.get_params():
        est.set_params(random_state=as_stream(random_state))
    return est.fit(points).location_
