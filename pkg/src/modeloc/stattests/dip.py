"""Hartigan dip statistic and its Monte-Carlo calibrated test.

The dip of a sample is the smallest sup-distance between its empirical
CDF and any unimodal CDF.  The computation follows the classical
greatest-convex-minorant / least-concave-majorant algorithm (Hartigan's
AS 217, in the corrected formulation used by the reference C
implementation): repeatedly fit the GCM and LCM over the current
interval, measure their largest discrepancy, and shrink the interval
until no improvement remains.

The null distribution depends on the sample size, so p-values come from
a Monte-Carlo table of dips of sorted uniform samples.  Tables are
cached per ``(n, n_boot, seed)`` behind a lock and built from a seed
sequence independent of any pipeline stream: every caller sharing the
default seed shares one table, which keeps repeated tests cheap and
reproducible.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from ..exceptions import EmptyInput, UnsortedInput

# Fixed root seed for calibration tables (independent of caller streams).
DIP_TABLE_SEED = 853904277
DEFAULT_N_BOOT = 2000


def _dip_sorted(x):
    # Port of the interval-shrinking GCM/LCM algorithm; expects x sorted
    # ascending with n >= 4 and x[0] != x[-1].  Returns 2n * dip.
    n = x.shape[0]
    mn = np.empty(n, dtype=np.int64)
    mj = np.empty(n, dtype=np.int64)
    gcm = np.empty(n + 1, dtype=np.int64)
    lcm = np.empty(n + 1, dtype=np.int64)

    mn[0] = 0
    for j in range(1, n):
        mn[j] = j - 1
        while True:
            mnj = mn[j]
            mnmnj = mn[mnj]
            if mnj == 0 or (x[j] - x[mnj]) * (mnj - mnmnj) < (x[mnj] - x[mnmnj]) * (j - mnj):
                break
            mn[j] = mnmnj
    mj[n - 1] = n - 1
    for k in range(n - 2, -1, -1):
        mj[k] = k + 1
        while True:
            mjk = mj[k]
            mjmjk = mj[mjk]
            if mjk == n - 1 or (x[k] - x[mjk]) * (mjk - mjmjk) < (x[mjk] - x[mjmjk]) * (k - mjk):
                break
            mj[k] = mjmjk

    low = 0
    high = n - 1
    dip_value = 0.0
    while True:
        gcm[0] = high
        i = 0
        while gcm[i] > low:
            gcm[i + 1] = mn[gcm[i]]
            i += 1
        ig = i
        l_gcm = i
        ix = ig - 1
        lcm[0] = low
        i = 0
        while lcm[i] < high:
            lcm[i + 1] = mj[lcm[i]]
            i += 1
        ih = i
        l_lcm = i
        iv = 1

        d = 0.0
        if l_gcm != 1 or l_lcm != 1:
            while True:
                gcmix = gcm[ix]
                lcmiv = lcm[iv]
                if gcmix > lcmiv:
                    gcmil = gcm[ix + 1]
                    dx = (lcmiv - gcmil + 1) - (x[lcmiv] - x[gcmil]) * (gcmix - gcmil) / (x[gcmix] - x[gcmil])
                    iv += 1
                    if dx >= d:
                        d = dx
                        ig = ix + 1
                        ih = iv - 1
                else:
                    lcmivl = lcm[iv - 1]
                    dx = (x[gcmix] - x[lcmivl]) * (lcmiv - lcmivl) / (x[lcmiv] - x[lcmivl]) - (gcmix - lcmivl - 1)
                    ix -= 1
                    if dx >= d:
                        d = dx
                        ig = ix + 1
                        ih = iv
                if ix < 0:
                    ix = 0
                if iv > l_lcm:
                    iv = l_lcm
                if gcm[ix] == lcm[iv]:
                    break
        if d < dip_value:
            break

        # largest deviation between the ECDF and the GCM ...
        dip_l = 0.0
        for j in range(ig, l_gcm):
            max_t = 1.0
            jb = gcm[j + 1]
            je = gcm[j]
            if je - jb > 1 and x[je] != x[jb]:
                c = (je - jb) / (x[je] - x[jb])
                for jj in range(jb, je + 1):
                    t = (jj - jb + 1) - (x[jj] - x[jb]) * c
                    if max_t < t:
                        max_t = t
            if dip_l < max_t:
                dip_l = max_t
        # ... and the LCM, over their current fitting ranges
        dip_u = 0.0
        for j in range(ih, l_lcm):
            max_t = 1.0
            jb = lcm[j]
            je = lcm[j + 1]
            if je - jb > 1 and x[je] != x[jb]:
                c = (je - jb) / (x[je] - x[jb])
                for jj in range(jb, je + 1):
                    t = (x[jj] - x[jb]) * c - (jj - jb - 1)
                    if max_t < t:
                        max_t = t
            if dip_u < max_t:
                dip_u = max_t

        dip_new = dip_u if dip_u > dip_l else dip_l
        if dip_value < dip_new:
            dip_value = dip_new
        if low == gcm[ig] and high == lcm[ih]:
            break
        low = gcm[ig]
        high = lcm[ih]
    return dip_value


def _dip_batch_py(rows):
    out = np.empty(rows.shape[0])
    for r in range(rows.shape[0]):
        out[r] = _dip_sorted(rows[r]) / (2.0 * rows.shape[1])
    return out


try:  # compiled kernels make per-size calibration tables affordable
    from numba import njit

    _dip_sorted = njit(cache=True)(_dip_sorted)
    _dip_batch = njit(cache=True)(_dip_batch_py)
except ImportError:  # pragma: no cover - exercised only without numba
    _dip_batch = _dip_batch_py


@dataclass(frozen=True)
class DipResult:
    statistic: float
    p_value: float

    def rejects(self, alpha: float) -> bool:
        return self.p_value < alpha


def dip_statistic(values) -> float:
    """Dip statistic of a sorted sequence.

    ``values`` must be sorted ascending (raises UnsortedInput
    otherwise).  Sequences shorter than 4 return the degenerate minimum
    ``1/(2n)``; constant sequences have dip 0.
    """
    x = np.asarray(values, dtype=float).reshape(-1)
    n = x.shape[0]
    if n == 0:
        raise EmptyInput("dip_statistic needs at least one value")
    if np.any(np.diff(x) < 0):
        raise UnsortedInput("dip_statistic expects values sorted ascending")
    if n < 4:
        return 1.0 / (2.0 * n)
    if x[0] == x[-1]:
        return 0.0
    return float(_dip_sorted(x)) / (2.0 * n)


_tables: dict = {}
_tables_lock = threading.Lock()


def _calibration_table(n: int, n_boot: int, seed: int) -> np.ndarray:
    key = (n, n_boot, seed)
    with _tables_lock:
        table = _tables.get(key)
    if table is not None:
        return table
    g = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n, n_boot)))
    u = g.random((n_boot, n))
    u.sort(axis=1)
    dips = np.sort(_dip_batch(u))
    with _tables_lock:
        _tables[key] = dips
    return dips


def dip_test(values, n_boot: int = DEFAULT_N_BOOT, table_seed: int = DIP_TABLE_SEED) -> DipResult:
    """Dip test of unimodality.

    The p-value is the fraction of ``n_boot`` sorted-uniform samples of
    the same size whose dip is at least the observed one (uniformity is
    the least favourable unimodal null).  Small samples (n < 4) are
    never rejected and report p = 1.
    """
    x = np.sort(np.asarray(values, dtype=float).reshape(-1))
    stat = dip_statistic(x)
    n = x.shape[0]
    if n < 4:
        return DipResult(stat, 1.0)
    table = _calibration_table(n, n_boot, table_seed)
    below = np.searchsorted(table, stat, side="left")
    return DipResult(stat, float(n_boot - below) / n_boot)
