"""Bootstrap / refine / iterate estimation of the dominant mode.

The pipeline has three stages:

* **bootstrap** — land a seed point inside *some* mode region, either by
  recursive depth trimming (repeatedly keep the deepest half) or by
  recursive application of a covering-subset minimizer (MCD/MVE).
* **refine** — grow a clean cluster around the seed: first strip the
  farthest samples until the distance distribution is unimodal (dip
  test), then strip by robust distance until a normality test stops
  rejecting.  Bootstrap followed by both refinements is the single-shot
  estimator ``brl``.
* **iterate** — run ``brl``, remove the found group, and repeat on the
  remainder until it is already unimodal (that run is *terminal*),
  exhausted, or too small.  The main mode is the largest non-terminal
  group; the terminal group is only eligible when it is the sole group.

All index sets refer to rows of the ``points`` argument of the entry
function and are returned sorted ascending.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import core, robust
from .depth import DepthMethod, as_depth_method, depth_all
from .exceptions import BadParameter, InsufficientSamples
from .rng import RngStream, as_stream
from .stattests import dip_test, ks_chisq_test, mardia_test
from .validation import check_point, check_points

DEFAULT_ALPHA = 0.05

# numeric rng path components (RngStream paths are integer tuples)
_BOOT, _REFINE = 0, 1


@dataclass(frozen=True)
class BootstrapMethod:
    """Configuration of the seed-finding stage.

    kind is "depth" (recursive depth trimming using ``depth``),
    "mcd" or "mve" (recursive minimizer).  ``trim_fraction`` is the
    fraction kept per round; ``min_size`` (depth variant only) is the
    target subset size, defaulting to ``max(d + 2, 4)``.
    """

    kind: str = "depth"
    depth: DepthMethod | None = None
    trim_fraction: float = 0.5
    min_size: int | None = None

    def __post_init__(self):
        if self.kind not in ("depth", "mcd", "mve"):
            raise BadParameter(f"unknown bootstrap kind {self.kind!r}")
        if not 0.0 < self.trim_fraction < 1.0:
            raise BadParameter("trim_fraction must lie strictly between 0 and 1")
        if self.kind == "depth":
            object.__setattr__(self, "depth", as_depth_method(self.depth or "tukey"))
        elif self.depth is not None:
            raise BadParameter("depth method only applies to kind='depth'")
        if self.min_size is not None and self.min_size < 2:
            raise BadParameter("min_size must be at least 2")

    def resolved_min_size(self, d: int) -> int:
        size = max(d + 2, 4) if self.min_size is None else int(self.min_size)
        if size < d + 1:
            raise BadParameter(f"min_size {size} is below d + 1 = {d + 1}")
        return size


def as_bootstrap_method(method) -> BootstrapMethod:
    """Coerce a name ("oja", "mcd", ...) or DepthMethod to a BootstrapMethod."""
    if isinstance(method, BootstrapMethod):
        return method
    if isinstance(method, DepthMethod):
        return BootstrapMethod(kind="depth", depth=method)
    if isinstance(method, str):
        low = method.lower()
        if low in ("mcd", "mve"):
            return BootstrapMethod(kind=low)
        return BootstrapMethod(kind="depth", depth=as_depth_method(low))
    raise BadParameter(f"cannot interpret {method!r} as a bootstrap method")


@dataclass(frozen=True)
class GroupRecord:
    """One extracted cluster: member rows, their mean, and provenance."""

    members: np.ndarray
    center: np.ndarray
    iteration: int
    terminal: bool

    @property
    def size(self) -> int:
        return int(self.members.size)


@dataclass(frozen=True)
class ModeEstimate:
    center: np.ndarray
    selected_index: int
    groups: tuple
    unassigned: np.ndarray
    diagnostics: dict = field(compare=False)

    @property
    def selected_group(self) -> GroupRecord:
        return self.groups[self.selected_index]


@dataclass(frozen=True)
class RefineResult:
    """Survivors of a refinement loop, with its p-value trace."""

    members: np.ndarray
    degenerate: bool
    p_values: tuple


def bootstrap(points, method=None, rng=None) -> np.ndarray:
    """Locate a seed point inside a mode region.

    Depth variant: repeatedly keep the ``ceil(trim_fraction * m)``
    deepest samples (ties by original order) until at most ``min_size``
    remain, then return their mean.  MCD/MVE variant: repeatedly keep
    the minimizer's covering subset of size ``ceil(trim_fraction * m)``,
    stopping before that size would drop below ``d + 1``.
    """
    method = as_bootstrap_method(method or "tukey")
    x = check_points(points, min_samples=2, name="points")
    n, d = x.shape
    rng = as_stream(rng)
    if method.kind == "depth":
        min_size = method.resolved_min_size(d)
        if n < min_size:
            raise InsufficientSamples(f"bootstrap needs at least {min_size} samples, got {n}")
        cur = x
        level = 0
        while cur.shape[0] > min_size:
            m = cur.shape[0]
            k = int(np.ceil(method.trim_fraction * m))
            if k >= m:
                k = m - 1
            depths = depth_all(cur, method.depth, rng=rng.child(_BOOT, level))
            order = np.argsort(-depths, kind="stable")[:k]
            cur = cur[np.sort(order)]
            level += 1
        return cur.mean(axis=0)

    minimize = robust.mcd if method.kind == "mcd" else robust.mve
    if n < d + 1:
        raise InsufficientSamples(f"bootstrap needs at least {d + 1} samples, got {n}")
    cur = x
    level = 0
    while True:
        m = cur.shape[0]
        h = int(np.ceil(method.trim_fraction * m))
        if h >= m:
            h = m - 1
        if h < d + 1:
            return cur.mean(axis=0)
        _, support = minimize(cur, h=h, rng=rng.child(_BOOT, level))
        cur = cur[support]
        level += 1


def refine_unimodal(points, seed, alpha: float = DEFAULT_ALPHA) -> RefineResult:
    """Strip distant samples until distances to ``seed`` are unimodal.

    Samples are ordered by Euclidean distance to the seed; while the
    dip test on the remaining distances rejects (p < alpha), the single
    farthest sample is removed.  Stops with ``degenerate=True`` when
    fewer than 4 samples would remain.
    """
    x = check_points(points, min_samples=4, name="points")
    seed = check_point(seed, x.shape[1], name="seed")
    dist = np.linalg.norm(x - seed, axis=1)
    order = np.argsort(dist, kind="stable")
    sorted_dist = dist[order]
    keep = x.shape[0]
    p_values = []
    while True:
        p = dip_test(sorted_dist[:keep]).p_value
        p_values.append(p)
        if p >= alpha:
            return RefineResult(np.sort(order[:keep]), False, tuple(p_values))
        if keep - 1 < 4:
            return RefineResult(np.sort(order[:keep]), True, tuple(p_values))
        keep -= 1


def refine_normal(points, unimodal, method=None, test: str = "mardia",
                  alpha: float = DEFAULT_ALPHA, rng=None):
    """Strip outlying samples until the subset looks Gaussian.

    Re-estimates the center by bootstrapping the unimodal subset, takes
    an MCD scatter of that subset, and orders samples once by the
    resulting robust distance.  While the normality test rejects, the
    farthest remaining sample is removed (floor ``d + 2``, flagged
    degenerate).  Returns ``(RefineResult, center)`` where center is the
    arithmetic mean of the survivors.
    """
    x = check_points(points, min_samples=2, name="points")
    idx = np.asarray(unimodal, dtype=np.intp).reshape(-1)
    n, d = x.shape
    if idx.size < d + 2:
        raise InsufficientSamples(
            f"normality refinement needs at least {d + 2} samples, got {idx.size}")
    method = as_bootstrap_method(method or "tukey")
    rng = as_stream(rng)
    sub = x[idx]
    m = sub.shape[0]

    center = bootstrap(sub, method, rng=rng.child(_BOOT))
    scatter, _ = robust.mcd(sub, h=robust.default_h(m, d), rng=rng.child(_REFINE))
    dist = robust.robust_distances(sub, core.LocationScatter(center, scatter.scatter))
    order = np.argsort(dist, kind="stable")

    if test not in ("mardia", "ks"):
        raise BadParameter(f"unknown normality test {test!r}; expected 'mardia' or 'ks'")
    tester = mardia_test if test == "mardia" else ks_chisq_test
    keep = m
    p_values = []
    degenerate = False
    while True:
        result = tester(sub[order[:keep]])
        p = min(result.skew_p_value, result.kurtosis_p_value) if test == "mardia" \
            else result.p_value
        p_values.append(p)
        if not result.rejects(alpha):
            break
        if keep - 1 < d + 2:
            degenerate = True
            break
        keep -= 1
    members_local = np.sort(order[:keep])
    survivors = idx[members_local]
    return (RefineResult(np.sort(survivors), degenerate, tuple(p_values)),
            x[np.sort(survivors)].mean(axis=0))


def brl(points, method=None, test: str = "mardia", alpha: float = DEFAULT_ALPHA,
        rng=None):
    """Bootstrap-and-refine locator: one bootstrap + both refinements.

    Returns ``(center, members)`` where members index rows of
    ``points``.
    """
    center, members, _ = _brl_verbose(points, method, test, alpha, as_stream(rng))
    return center, members


def _brl_verbose(points, method, test, alpha, rng):
    x = check_points(points, min_samples=2, name="points")
    d = x.shape[1]
    method = as_bootstrap_method(method or "tukey")
    if x.shape[0] < max(method.resolved_min_size(d), d + 2):
        raise InsufficientSamples(
            f"brl needs at least {max(method.resolved_min_size(d), d + 2)} samples")
    seed = bootstrap(x, method, rng=rng.child(_BOOT))
    uni = refine_unimodal(x, seed, alpha)
    normal, center = refine_normal(x, uni.members, method, test, alpha,
                                   rng=rng.child(_REFINE))
    diag = {
        "seed": seed,
        "unimodal_p_values": uni.p_values,
        "unimodal_removed": int(x.shape[0] - uni.members.size),
        "unimodal_degenerate": uni.degenerate,
        "normal_p_values": normal.p_values,
        "normal_removed": int(uni.members.size - normal.members.size),
        "normal_degenerate": normal.degenerate,
    }
    return center, normal.members, diag


def bril(points, method=None, test: str = "mardia", alpha: float = DEFAULT_ALPHA,
         rng=None) -> ModeEstimate:
    """Iterated BRL: extract groups until the remainder is unimodal.

    Each iteration removes one refined group.  When the remaining
    samples are already unimodal around their own bootstrap seed the
    final group is extracted and marked terminal; iteration also stops
    when fewer than the minimum workable count remain.  The selected
    group is the largest among non-terminal groups (earliest iteration
    on ties); a lone group is selected even if terminal.
    """
    x = check_points(points, min_samples=2, name="points")
    n, d = x.shape
    method = as_bootstrap_method(method or "tukey")
    rng = as_stream(rng)
    floor = max(method.resolved_min_size(d), d + 2)
    if n < floor:
        raise InsufficientSamples(f"bril needs at least {floor} samples, got {n}")

    remaining = np.arange(n)
    raw_groups = []
    iter_diags = []
    stop_reason = None
    iteration = 0
    while True:
        if remaining.size == 0:
            stop_reason = "all samples assigned"
            break
        if remaining.size < floor:
            stop_reason = "remaining subset too small"
            break
        iteration += 1
        sub = x[remaining]
        it_rng = rng.child(iteration)
        seed = bootstrap(sub, method, rng=it_rng.child(_BOOT))
        dist = np.sort(np.linalg.norm(sub - seed, axis=1))
        initial_p = dip_test(dist).p_value
        already_unimodal = initial_p >= alpha

        uni = refine_unimodal(sub, seed, alpha)
        normal, center = refine_normal(sub, uni.members, method, test, alpha,
                                       rng=it_rng.child(_REFINE))
        members = remaining[normal.members]
        raw_groups.append((members, center, iteration))
        iter_diags.append({
            "iteration": iteration,
            "remaining": int(remaining.size),
            "seed": seed,
            "initial_dip_p": initial_p,
            "unimodal_p_values": uni.p_values,
            "unimodal_removed": int(sub.shape[0] - uni.members.size),
            "unimodal_degenerate": uni.degenerate,
            "normal_p_values": normal.p_values,
            "normal_removed": int(uni.members.size - normal.members.size),
            "normal_degenerate": normal.degenerate,
        })
        remaining = np.setdiff1d(remaining, members, assume_unique=True)
        if already_unimodal:
            stop_reason = "remainder already unimodal"
            break

    # The group of the final iteration is the terminal one: it absorbed
    # whatever was left rather than competing as a candidate mode.
    groups = tuple(
        GroupRecord(members, center, it, terminal=(k == len(raw_groups) - 1))
        for k, (members, center, it) in enumerate(raw_groups)
    )
    if len(groups) == 1:
        selected = 0
    else:
        candidates = [(g.size, -g.iteration, i)
                      for i, g in enumerate(groups) if not g.terminal]
        selected = max(candidates)[2]
    diagnostics = {"iterations": iter_diags, "stop_reason": stop_reason}
    return ModeEstimate(
        center=groups[selected].center,
        selected_index=selected,
        groups=groups,
        unassigned=remaining,
        diagnostics=diagnostics,
    )
