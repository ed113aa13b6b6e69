"""Multivariate normality tests used by the distribution-refinement stage.

Two complementary checks:

* Mardia's moment tests — sample multivariate skewness ``b1`` with
  ``n * b1 / 6`` referred to a chi-squared law, and kurtosis ``b2``
  standardised to an asymptotic normal.  Both moments use the biased
  (divisor ``n``) covariance, matching their classical definitions.
* A Kolmogorov-Smirnov test of the squared Mahalanobis distances
  against the chi-squared distribution with ``d`` degrees of freedom,
  which they follow (asymptotically) under normality.

The skewness statistic is accumulated through the third-moment tensor
of the whitened sample, so memory stays O(n d^2) instead of the naive
O(n^2) double sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .. import core
from ..validation import check_points


@dataclass(frozen=True)
class MardiaResult:
    skew_statistic: float
    skew_p_value: float
    kurtosis_statistic: float
    kurtosis_p_value: float

    def rejects(self, alpha: float) -> bool:
        """Reject normality when either moment test does."""
        return self.skew_p_value < alpha or self.kurtosis_p_value < alpha


@dataclass(frozen=True)
class KSNormalityResult:
    statistic: float
    p_value: float

    def rejects(self, alpha: float) -> bool:
        return self.p_value < alpha


def _whitened(points):
    x = check_points(points, min_samples=2, name="points")
    n, d = x.shape
    centred = x - x.mean(axis=0)
    cov = centred.T @ centred / n
    vals, vecs = np.linalg.eigh(cov)
    tol = np.max(np.abs(vals)) * core.SINGULARITY_RTOL
    if np.min(vals) <= tol:
        from ..exceptions import SingularScatter

        raise SingularScatter("covariance is singular; normality moments undefined")
    inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.T
    return centred @ inv_sqrt, n, d


def mardia_test(points) -> MardiaResult:
    """Mardia's multivariate skewness and kurtosis tests."""
    z, n, d = _whitened(points)
    # b1 = mean over pairs of (z_i . z_j)^3 = squared norm of the
    # third-moment tensor sum_i z_ia z_ib z_ic, divided by n^2.
    t3 = np.einsum("na,nb,nc->abc", z, z, z)
    b1 = float(np.sum(t3 * t3)) / (n * n)
    sq = np.einsum("ni,ni->n", z, z)
    b2 = float(np.mean(sq * sq))

    skew_stat = n * b1 / 6.0
    skew_df = d * (d + 1) * (d + 2) / 6.0
    skew_p = float(stats.chi2.sf(skew_stat, skew_df))

    kurt_stat = (b2 - d * (d + 2)) / np.sqrt(8.0 * d * (d + 2) / n)
    kurt_p = float(2.0 * stats.norm.sf(abs(kurt_stat)))
    return MardiaResult(float(skew_stat), skew_p, float(kurt_stat), kurt_p)


def ks_chisq_test(points) -> KSNormalityResult:
    """KS test of squared Mahalanobis distances against chi2(d)."""
    x = check_points(points, min_samples=2, name="points")
    n, d = x.shape
    centre = x.mean(axis=0)
    d2 = np.sort(core.mahalanobis_squared(x, centre, core.covariance(x)))
    cdf = stats.chi2.cdf(d2, d)
    i = np.arange(1, n + 1)
    stat = float(np.max(np.maximum(i / n - cdf, cdf - (i - 1) / n)))
    p = float(special.kolmogorov(np.sqrt(n) * stat))
    return KSNormalityResult(stat, p)


def normality_rejects(points, test: str = "mardia", alpha: float = 0.05) -> bool:
    """Convenience dispatcher used by the refinement loop."""
    if test == "mardia":
        return mardia_test(points).rejects(alpha)
    if test == "ks":
        return ks_chisq_test(points).rejects(alpha)
    from ..exceptions import BadParameter

    raise BadParameter(f"unknown normality test {test!r}; expected 'mardia' or 'ks'")
