"""Error metrics, Monte-Carlo benchmark grids, and real-data evaluation.

A benchmark grid crosses mixture cells with estimator specs.  Every
``(cell, repetition)`` pair owns a derived RNG stream, and each
estimator draws from a further sub-stream keyed by a CRC of its spec
string, so results are independent of scheduling, worker count and of
which other estimators run alongside.  All estimators in a repetition
see the same generated instance, which mirrors how paired comparisons
are usually reported.

Estimator failures inside a repetition (degenerate data, singular
scatter, ...) are recorded as infinite-error misses instead of aborting
the grid; the failure counts are kept in the result's diagnostics.

Wall-clock timings are collected per fit and reported as medians, but
kept out of the deterministic core: with ``with_timing=False`` the
output tables are byte-identical across reruns and worker counts.
"""

from __future__ import annotations

import csv
import json
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .estimators import make_estimator
from .exceptions import (
    BadParameter,
    EmptyInput,
    InsufficientSamples,
    MissingGroundTruth,
    ModeLocError,
)
from .rng import RngStream, as_stream
from .synthgen import MixtureConfig, generate

HIT_THRESHOLD = 3.0

CSV_COLUMNS = ("config_id", "estimator", "mean_error", "sd", "sse", "hit_rate",
               "miss_rate", "hits_mean_error", "hits_sse", "median_ms")


def error(estimate, truth) -> float:
    """Euclidean distance between an estimate and the true center."""
    a = np.asarray(estimate, dtype=float).reshape(-1)
    b = np.asarray(truth, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise BadParameter(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def is_hit(err: float, threshold: float = HIT_THRESHOLD) -> bool:
    """Strictly-below-threshold test (an error of exactly 3.0 is a miss)."""
    return err < threshold


@dataclass(frozen=True)
class RunMetrics:
    mean_error: float
    sd: float
    sse: float
    hit_rate: float
    miss_rate: float
    n_reps: int
    hits_only_mean_error: float
    hits_only_sse: float

    def to_dict(self) -> dict:
        return {
            "mean_error": self.mean_error,
            "sd": self.sd,
            "sse": self.sse,
            "hit_rate": self.hit_rate,
            "miss_rate": self.miss_rate,
            "n_reps": self.n_reps,
            "hits_only_mean_error": self.hits_only_mean_error,
            "hits_only_sse": self.hits_only_sse,
        }


def aggregate(errors, threshold: float = HIT_THRESHOLD) -> RunMetrics:
    """Summarise a sequence of per-repetition errors."""
    errs = np.asarray(errors, dtype=float).reshape(-1)
    if errs.size == 0:
        raise EmptyInput("cannot aggregate an empty error sequence")
    hits = errs[errs < threshold]
    n = errs.size
    return RunMetrics(
        mean_error=float(np.mean(errs)),
        sd=float(np.std(errs, ddof=1)) if n > 1 else float("nan"),
        sse=float(np.sum(errs * errs)),
        hit_rate=hits.size / n,
        miss_rate=1.0 - hits.size / n,
        n_reps=n,
        hits_only_mean_error=float(np.mean(hits)) if hits.size else float("nan"),
        hits_only_sse=float(np.sum(hits * hits)) if hits.size else float("nan"),
    )


def resolve_threads(threads=None) -> int:
    """Worker count: MODELOC_THREADS env var wins over the argument."""
    env = os.environ.get("MODELOC_THREADS")
    if env:
        return max(1, int(env))
    if threads is None:
        return 1
    return max(1, int(threads))


def spec_stream_key(spec: str) -> int:
    # stable across processes and runs, and independent of which other
    # estimators participate in the grid
    return zlib.crc32(spec.encode("utf-8"))


def _fit_once(spec, points, stream):
    est = make_estimator(spec)
    if "random_state" in est.get_params():
        est.set_params(random_state=stream)
    return est.fit(points).location_


def _run_repetition(args):
    cell_index, config, rep, root, specs, with_timing = args
    inst = generate(config, root.child(cell_index, rep))
    out = []
    for spec in specs:
        stream = root.child(cell_index, rep, spec_stream_key(spec))
        start = time.perf_counter()
        try:
            center = _fit_once(spec, inst.points, stream)
            err = error(center, inst.main_center)
            failed = False
        except ModeLocError:
            err = float("inf")
            failed = True
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        out.append((err, elapsed_ms if with_timing else None, failed))
    return cell_index, rep, out


@dataclass(frozen=True)
class BenchmarkResult:
    cells: tuple
    estimators: tuple
    errors: dict
    timings_ms: dict | None
    failures: dict
    threshold: float
    seed: RngStream

    def metrics(self, config_id: str, spec: str) -> RunMetrics:
        return aggregate(self.errors[(config_id, spec)], self.threshold)

    def pooled_errors(self, spec: str) -> np.ndarray:
        return np.concatenate([self.errors[(c.config_id(), spec)] for c in self.cells])

    def pooled_metrics(self, spec: str) -> RunMetrics:
        return aggregate(self.pooled_errors(spec), self.threshold)

    def rows(self):
        for cell in self.cells:
            cid = cell.config_id()
            for spec in self.estimators:
                m = self.metrics(cid, spec)
                if self.timings_ms is not None:
                    ms = float(np.median(self.timings_ms[(cid, spec)]))
                else:
                    ms = None
                yield cid, spec, m, ms

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for cid, spec, m, ms in self.rows():
                writer.writerow([
                    cid, spec, repr(m.mean_error), repr(m.sd), repr(m.sse),
                    repr(m.hit_rate), repr(m.miss_rate),
                    repr(m.hits_only_mean_error), repr(m.hits_only_sse),
                    "" if ms is None else repr(ms),
                ])

    def to_json(self, path) -> None:
        payload = {
            "seed": {"seed": self.seed.seed, "path": list(self.seed.path)},
            "threshold": self.threshold,
            "cells": [c.to_dict() for c in self.cells],
            "estimators": list(self.estimators),
            "results": [
                {
                    "config_id": cid,
                    "estimator": spec,
                    "metrics": m.to_dict(),
                    "median_ms": ms,
                    "failures": self.failures[(cid, spec)],
                }
                for cid, spec, m, ms in self.rows()
            ],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)


def benchmark_grid(cells, estimators, reps: int, rng=None, threads=None,
                   with_timing: bool = True, threshold: float = HIT_THRESHOLD) -> BenchmarkResult:
    """Run every estimator on ``reps`` instances of every mixture cell."""
    cells = tuple(cells)
    specs = tuple(estimators)
    if reps < 1:
        raise BadParameter("reps must be at least 1")
    if not cells or not specs:
        raise EmptyInput("benchmark needs at least one cell and one estimator")
    ids = [c.config_id() for c in cells]
    if len(set(ids)) != len(ids):
        raise BadParameter("duplicate config_id in grid cells")
    for spec in specs:
        make_estimator(spec)  # fail fast on bad specs
    root = as_stream(rng)
    n_workers = resolve_threads(threads)

    tasks = [(ci, cell, rep, root, specs, with_timing)
             for ci, cell in enumerate(cells) for rep in range(reps)]
    if n_workers == 1:
        raw = [_run_repetition(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            raw = list(pool.map(_run_repetition, tasks, chunksize=4))
    raw.sort(key=lambda item: (item[0], item[1]))

    errors = {}
    timings = {} if with_timing else None
    failures = {}
    for ci, cell in enumerate(cells):
        cid = ids[ci]
        per_cell = [entry for entry in raw if entry[0] == ci]
        for si, spec in enumerate(specs):
            errs = np.array([entry[2][si][0] for entry in per_cell])
            errors[(cid, spec)] = errs
            if with_timing:
                timings[(cid, spec)] = np.array([entry[2][si][1] for entry in per_cell])
            failures[(cid, spec)] = int(sum(entry[2][si][2] for entry in per_cell))
    return BenchmarkResult(cells, specs, errors, timings, failures, threshold, root)


def load_grid(path) -> tuple:
    """Read a grid file (JSON with a ``cells`` list of config dicts)."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "cells" not in data or not data["cells"]:
        raise BadParameter(f"grid file {path} must contain a non-empty 'cells' list")
    return tuple(MixtureConfig.from_dict(cell) for cell in data["cells"])


# ---------------------------------------------------------------------------
# real calibration recordings


@dataclass(frozen=True)
class RealEvalConfig:
    draws: int = 25
    draw_size: int = 1000
    pixel_per_degree: float = 25.0
    valid_box: tuple | None = None

    def __post_init__(self):
        if self.draws < 1:
            raise BadParameter("draws must be at least 1")
        if self.draw_size < 2:
            raise BadParameter("draw_size must be at least 2")
        if self.pixel_per_degree <= 0:
            raise BadParameter("pixel_per_degree must be positive")


def read_calibration_csv(path):
    """Read ``trial,target,x,y`` rows into (targets, points) arrays."""
    targets, xs, ys = [], [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        needed = {"trial", "target", "x", "y"}
        if reader.fieldnames is None or not needed.issubset(set(reader.fieldnames)):
            raise BadParameter(
                f"calibration file {path} must have columns trial,target,x,y")
        for line, row in enumerate(reader, start=2):
            try:
                targets.append(int(row["target"]))
                xs.append(float(row["x"]))
                ys.append(float(row["y"]))
            except (TypeError, ValueError):
                raise BadParameter(f"{path}:{line}: malformed row {row!r}") from None
    if not targets:
        raise EmptyInput(f"calibration file {path} has no data rows")
    return np.array(targets), np.column_stack([xs, ys]).astype(float)


def read_ground_truth(path) -> dict:
    """Read a JSON map of target id -> [x, y]."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or not data:
        raise BadParameter(f"ground truth {path} must be a non-empty target->point map")
    out = {}
    for key, value in data.items():
        point = np.asarray(value, dtype=float).reshape(-1)
        if point.size != 2:
            raise BadParameter(f"ground truth for target {key} is not a 2-vector")
        out[int(key)] = point
    return out


def real_eval(targets, points, truth: dict, config: RealEvalConfig, estimators,
              rng=None, threshold: float | None = None):
    """Repeated-draw evaluation against annotated target positions.

    For every target, ``config.draws`` random subsets of
    ``config.draw_size`` samples are drawn without replacement and each
    estimator's error to the ground-truth coordinate is recorded (in
    pixels).  Returns ``(per_target, overall)`` where ``per_target``
    maps ``(target, spec) -> RunMetrics`` and ``overall`` pools the
    draws of all targets per estimator.  The hit threshold defaults to
    3 visual degrees converted to pixels.
    """
    targets = np.asarray(targets)
    pts = np.asarray(points, dtype=float)
    specs = tuple(estimators)
    for spec in specs:
        make_estimator(spec)
    if threshold is None:
        threshold = 3.0 * config.pixel_per_degree
    if config.valid_box is not None:
        (x0, x1), (y0, y1) = config.valid_box
        ok = ((pts[:, 0] >= x0) & (pts[:, 0] <= x1)
              & (pts[:, 1] >= y0) & (pts[:, 1] <= y1))
        targets, pts = targets[ok], pts[ok]
    root = as_stream(rng)

    unique = sorted(set(int(t) for t in targets))
    per_target_errors = {}
    for ti, target in enumerate(unique):
        if target not in truth:
            raise MissingGroundTruth(f"no ground truth for target {target}")
        rows = pts[targets == target]
        if rows.shape[0] < config.draw_size:
            raise InsufficientSamples(
                f"target {target} has {rows.shape[0]} valid samples, "
                f"fewer than draw_size={config.draw_size}")
        errs = {spec: [] for spec in specs}
        for draw in range(config.draws):
            pick = root.child(ti, draw).generator().choice(
                rows.shape[0], size=config.draw_size, replace=False)
            sample = rows[pick]
            for spec in specs:
                stream = root.child(ti, draw, spec_stream_key(spec))
                try:
                    center = _fit_once(spec, sample, stream)
                    errs[spec].append(error(center, truth[target]))
                except ModeLocError:
                    errs[spec].append(float("inf"))
        for spec in specs:
            per_target_errors[(target, spec)] = np.array(errs[spec])

    per_target = {key: aggregate(vals, threshold)
                  for key, vals in per_target_errors.items()}
    overall = {
        spec: aggregate(np.concatenate(
            [per_target_errors[(t, spec)] for t in unique]), threshold)
        for spec in specs
    }
    return per_target, overall


def real_eval_to_csv(path, per_target, overall) -> None:
    """Write per-target rows plus pooled ``overall`` rows, benchmark layout."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for (target, spec), m in sorted(per_target.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            writer.writerow([
                f"target-{target}", spec, repr(m.mean_error), repr(m.sd), repr(m.sse),
                repr(m.hit_rate), repr(m.miss_rate),
                repr(m.hits_only_mean_error), repr(m.hits_only_sse), "",
            ])
        for spec in sorted(overall):
            m = overall[spec]
            writer.writerow([
                "overall", spec, repr(m.mean_error), repr(m.sd), repr(m.sse),
                repr(m.hit_rate), repr(m.miss_rate),
                repr(m.hits_only_mean_error), repr(m.hits_only_sse), "",
            ])
