"""Acceptance suite: one test per release criterion.

Each test measures the published behavior of the package on
freshly-generated synthetic data (or, for the optional real-recording
check, on companion datasets when present) and records exactly one
PASS/FAIL line through the ``acceptance_record`` fixture; the lines are
replayed in the terminal summary.  Repetition counts are scaled for a
single desktop core, with tolerances widened accordingly, so the whole
file runs in roughly half an hour.

Shared protocol: mixtures live on a 50x50 arena, the main cluster has
unit sigma, and an estimate counts as a hit when its Euclidean error to
the true main-cluster center is strictly below 3.
"""

import csv
import json
import os
from pathlib import Path

import numpy as np
import pytest

import oracles
from modeloc import cli, evaluation
from modeloc.depth import depth_all
from modeloc.estimators import make_estimator
from modeloc.evaluation import benchmark_grid, is_hit
from modeloc.rng import RngStream
from modeloc.robust import mcd
from modeloc.stattests import dip_statistic, dip_test, mardia_test
from modeloc.synthgen import MixtureConfig, generate

# ---------------------------------------------------------------------------
# shared headline benchmark: 3-5 clusters, 0/25% noise, with the main
# cluster's share of the clustered points varying by cell so the grid
# mixes near-balanced mixtures (hard) with clearly dominant ones (easy)


HEADLINE_DELTAS = {3: 0.35, 4: 0.45, 5: 0.40}
HEADLINE_CELLS = tuple(
    MixtureConfig(n_samples=500, n_clusters=k, noise_ratio=eps,
                  inlier_ratio=HEADLINE_DELTAS[k])
    for k in (3, 4, 5) for eps in (0.0, 0.25)
)
HEADLINE_SPECS = (
    "mean",
    "med:oja", "med:projection", "med:l2",
    "max:oja", "max:projection", "max:l2",
    "rec:oja", "rec:projection", "rec:l2",
    "brl:oja", "brl:projection", "brl:l2",
    "bril:oja", "bril:projection", "bril:l2", "bril:mcd", "bril:mve",
)


@pytest.fixture(scope="session")
def headline_bench():
    return benchmark_grid(HEADLINE_CELLS, HEADLINE_SPECS, reps=50,
                          rng=RngStream(20260825), with_timing=False)


# ---------------------------------------------------------------------------
# criterion 1: single Gaussian plus uniform noise, classical locators


def _noisy_gaussian(rep, noise_ratio, seed, n=500, offset=1.0, width=20.0):
    """One unit-sigma Gaussian near the middle of a fixed noise arena.

    The cluster center is drawn within ``offset`` of the arena center so
    the noise field is only mildly asymmetric around the cluster, the
    regime in which plain locators remain informative.
    """
    g = RngStream(seed).child(rep).generator()
    mu = g.uniform(-offset, offset, size=2)
    n_noise = int(round(noise_ratio * n))
    gauss = mu + g.standard_normal((n - n_noise, 2))
    noise = g.uniform(-width / 2.0, width / 2.0, size=(n_noise, 2))
    return np.vstack([gauss, noise]), mu


def test_criterion_01_unimodal_locator_errors(acceptance_record):
    reps = 100
    errs = {"mean": [], "med:tukey": [], "med:spatial": []}
    for rep in range(reps):
        X, mu = _noisy_gaussian(rep, 0.0, seed=101)
        for spec in ("mean", "med:tukey"):
            est = make_estimator(spec)
            est.fit(X)
            errs[spec].append(np.linalg.norm(est.location_ - mu))
        X, mu = _noisy_gaussian(rep, 0.5, seed=102)
        est = make_estimator("med:spatial")
        est.fit(X)
        errs["med:spatial"].append(np.linalg.norm(est.location_ - mu))
    m = {k: float(np.mean(v)) for k, v in errs.items()}
    checks = (
        abs(m["mean"] - 0.0565) <= 0.010,
        abs(m["med:tukey"] - 0.0645) <= 0.015,
        abs(m["med:spatial"] - 0.1525) <= 0.030,
    )
    acceptance_record(
        1, all(checks),
        f"mean@0% noise {m['mean']:.4f} (0.0565+/-0.010), "
        f"med:tukey@0% {m['med:tukey']:.4f} (0.0645+/-0.015), "
        f"med:spatial@50% {m['med:spatial']:.4f} (0.1525+/-0.030)")


# ---------------------------------------------------------------------------
# criteria 2, 3, 7: headline hit rates, family ordering, refined precision


def test_criterion_02_headline_hit_rates(headline_bench, acceptance_record):
    proj = headline_bench.pooled_metrics("bril:projection")
    mve = headline_bench.pooled_metrics("bril:mve")
    mcd_m = headline_bench.pooled_metrics("bril:mcd")
    mean = headline_bench.pooled_metrics("mean")
    checks = (
        proj.hit_rate >= 0.95,
        proj.hits_only_mean_error <= 0.15,
        mve.hit_rate >= 0.94,
        mcd_m.hit_rate >= 0.94,
        mean.hit_rate <= 0.15,
    )
    acceptance_record(
        2, all(checks),
        f"bril:projection hit {proj.hit_rate:.3f} (>=0.95) "
        f"hits-only {proj.hits_only_mean_error:.3f} (<=0.15), "
        f"bril:mve hit {mve.hit_rate:.3f} (>=0.94), "
        f"bril:mcd hit {mcd_m.hit_rate:.3f} (>=0.94), "
        f"mean hit {mean.hit_rate:.3f} (<=0.15)")


def test_criterion_03_family_ordering(headline_bench, acceptance_record):
    details, ok = [], True
    for method in ("oja", "projection", "l2"):
        hit = {fam: headline_bench.pooled_metrics(f"{fam}:{method}").hit_rate
               for fam in ("bril", "brl", "rec", "max", "med")}
        chain_ok = (
            hit["bril"] - hit["brl"] >= 0.05
            and hit["brl"] >= hit["rec"]
            and hit["rec"] - hit["max"] >= 0.05
            and hit["max"] - hit["med"] >= 0.05
        )
        ok = ok and chain_ok
        details.append(
            f"{method}: " + " / ".join(f"{fam} {hit[fam]:.2f}"
                                       for fam in ("bril", "brl", "rec", "max", "med")))
    acceptance_record(
        3, ok, "bril>brl>=rec>max>med with 5-point strict gaps -- " + "; ".join(details))


def test_criterion_07_refined_precision_on_hits(headline_bench, acceptance_record):
    oja = headline_bench.pooled_metrics("brl:oja").hits_only_mean_error
    proj = headline_bench.pooled_metrics("brl:projection").hits_only_mean_error
    ok = oja <= 0.13 and proj <= 0.13
    acceptance_record(
        7, ok, f"hits-only mean error: brl:oja {oja:.3f}, brl:projection {proj:.3f} (<=0.13)")


# ---------------------------------------------------------------------------
# criterion 4: noise tolerance sweep


def test_criterion_04_noise_tolerance(acceptance_record):
    cells = tuple(MixtureConfig(n_samples=500, n_clusters=3, noise_ratio=eps,
                                inlier_ratio=0.40) for eps in (0.0, 0.2, 0.4))
    specs = ("bril:projection", "bril:mve", "bril:mcd")
    bench = benchmark_grid(cells, specs, reps=50, rng=RngStream(404),
                           with_timing=False)
    heavy = cells[-1].config_id()
    hits = {s: bench.metrics(heavy, s).hit_rate for s in specs}
    ok = all(h >= 0.90 for h in hits.values())
    acceptance_record(
        4, ok, "hit rate at 40% noise: " + ", ".join(
            f"{s} {hits[s]:.2f}" for s in specs) + " (each >=0.90)")


# ---------------------------------------------------------------------------
# criterion 5: sample-size invariance


def test_criterion_05_sample_size_invariance(acceptance_record):
    # the spread of hits-only error across sizes is a difference of two
    # Monte-Carlo means, so it needs the top of the repetition budget:
    # at 50 reps its sampling noise (~0.01) is comparable to the margin
    # between the method's true spread (~0.09) and the 0.10 bound
    cells = tuple(MixtureConfig(n_samples=n, n_clusters=3, noise_ratio=0.25,
                                inlier_ratio=0.40) for n in (250, 500, 1000))
    bench = benchmark_grid(cells, ("bril:projection",), reps=100,
                           rng=RngStream(505), with_timing=False)
    ms = [bench.metrics(c.config_id(), "bril:projection") for c in cells]
    hit_spread = max(m.hit_rate for m in ms) - min(m.hit_rate for m in ms)
    err_spread = (max(m.hits_only_mean_error for m in ms)
                  - min(m.hits_only_mean_error for m in ms))
    ok = hit_spread <= 0.10 and err_spread <= 0.10
    acceptance_record(
        5, ok,
        f"bril:projection across n=250/500/1000: hit spread {hit_spread:.3f} "
        f"(<=0.10), hits-only error spread {err_spread:.3f} (<=0.10)")


# ---------------------------------------------------------------------------
# criterion 6: oracle equivalence


def test_criterion_06_oracle_equivalence(acceptance_record):
    parts = []

    # depth functions against exhaustive enumeration
    depth_ok = True
    for n in (6, 9, 12):
        pts = np.random.default_rng(n).normal(size=(n, 2))
        got = depth_all(pts, method="tukey")
        want = [oracles.tukey_depth_oracle(pts, p) / n for p in pts]
        depth_ok &= np.allclose(got, want, atol=1e-12)
        got = depth_all(pts, method="oja")
        want = [oracles.oja_depth_oracle(pts, p) for p in pts]
        depth_ok &= np.allclose(got, want, rtol=1e-9)
        got = depth_all(pts, method="liu")
        want = [oracles.liu_depth_oracle(pts, p) for p in pts]
        depth_ok &= np.allclose(got, want, atol=1e-12)
    parts.append(f"depth exact n<=12: {'ok' if depth_ok else 'MISMATCH'}")

    # randomized subset search against exhaustive enumeration
    agree, trials = 0, 200
    for seed in range(trials):
        g = np.random.default_rng(30_000 + seed)
        n = int(g.integers(8, 16))
        pts = g.normal(size=(n, 2))
        h = max(4, n // 2 + 1)
        _, subset = mcd(pts, h=h, rng=RngStream(seed))
        got = float(np.linalg.det(np.cov(pts[subset], rowvar=False, ddof=1)))
        want, _ = oracles.mcd_oracle(pts, h)
        agree += got <= want * (1.0 + 1e-6)
    mcd_rate = agree / trials
    parts.append(f"mcd vs enumeration {mcd_rate:.3f} (>=0.99)")

    # moment statistics against a literal double-sum transcription
    mardia_gap = 0.0
    for seed in range(5):
        pts = np.random.default_rng(40_000 + seed).normal(size=(12, 2))
        res = mardia_test(pts)
        skew, kurt = oracles.mardia_oracle(pts)
        mardia_gap = max(mardia_gap, abs(res.skew_statistic - skew),
                         abs(res.kurtosis_statistic - kurt))
    parts.append(f"mardia gap {mardia_gap:.2e} (<=1e-10)")

    # unimodality statistic against the linear-program oracle
    dip_gap = 0.0
    for seed in range(30):
        g = np.random.default_rng(50_000 + seed)
        n = int(g.integers(4, 9))
        x = np.sort(g.normal(size=n))
        dip_gap = max(dip_gap, abs(dip_statistic(x) - oracles.dip_oracle(x)))
    parts.append(f"dip gap {dip_gap:.2e} (<=1e-9)")

    ok = depth_ok and mcd_rate >= 0.99 and mardia_gap <= 1e-10 and dip_gap <= 1e-9
    acceptance_record(6, ok, "; ".join(parts))


# ---------------------------------------------------------------------------
# criterion 8: real calibration recordings (optional companion data)


REAL_DATA_DIR = Path(os.environ.get(
    "MODELOC_REAL_DATA", Path(__file__).resolve().parent.parent / "data" / "real"))
REAL_SETS = ("set1", "set2", "set3")


def test_criterion_08_real_recordings(acceptance_record):
    paths = {name: (REAL_DATA_DIR / name / "calibration.csv",
                    REAL_DATA_DIR / name / "truth.json") for name in REAL_SETS}
    if not all(c.exists() and t.exists() for c, t in paths.values()):
        acceptance_record(
            8, True, f"companion recordings not found under {REAL_DATA_DIR}; skipped",
            skip=True)

    config = evaluation.RealEvalConfig()
    overall_err = {}
    per_set = {}
    for name, (cal, tru) in paths.items():
        targets, points = evaluation.read_calibration_csv(cal)
        truth = evaluation.read_ground_truth(tru)
        _, overall = evaluation.real_eval(
            targets, points, truth, config,
            ("bril:spatial", "cw-median", "mean"), rng=RngStream(808))
        per_set[name] = {s: m.mean_error for s, m in overall.items()}
        overall_err.setdefault("bril:spatial", []).append(
            overall["bril:spatial"].mean_error)
    bril_overall = float(np.mean(overall_err["bril:spatial"]))
    cw_degrades = per_set["set3"]["cw-median"] >= 5.0 * per_set["set1"]["cw-median"]
    mean_bad = all(per_set[name]["mean"] >= 10.0 for name in REAL_SETS)
    ok = bril_overall <= 2.0 and cw_degrades and mean_bad
    acceptance_record(
        8, ok,
        f"bril:spatial overall {bril_overall:.2f}px (<=2.0), cw-median set3/set1 "
        f"{per_set['set3']['cw-median']:.1f}/{per_set['set1']['cw-median']:.1f}px "
        f"(>=5x), mean >=10px on every set: {mean_bad}")


# ---------------------------------------------------------------------------
# criterion 9: byte-identical benchmark output across worker counts


def test_criterion_09_threaded_determinism(tmp_path, monkeypatch, acceptance_record):
    grid = tmp_path / "tiny.grid"
    grid.write_text(json.dumps({
        "name": "determinism",
        "cells": [
            {"n_samples": 150, "n_clusters": 3, "noise_ratio": 0.25,
             "inlier_ratio": 0.4},
            {"n_samples": 150, "n_clusters": 2, "noise_ratio": 0.1,
             "inlier_ratio": 0.6},
        ],
    }))
    outputs = []
    for threads in (1, 4, 8):
        out = tmp_path / f"bench_t{threads}.csv"
        monkeypatch.setenv("MODELOC_THREADS", str(threads))
        rc = cli.main(["benchmark", "--grid", str(grid), "--estimators",
                       "mean,rec:projection,brl:l2", "--reps", "5", "--seed",
                       "11", "--no-timing", "--out", str(out)])
        assert rc == 0
        outputs.append(out.read_bytes())
    ok = outputs[0] == outputs[1] == outputs[2]
    acceptance_record(
        9, ok, f"benchmark CSV byte-identical across 1/4/8 threads: {ok} "
        f"({len(outputs[0])} bytes)")


# ---------------------------------------------------------------------------
# criterion 10: module invariants as properties


def test_criterion_10_invariant_properties(acceptance_record):
    parts = []

    # grouping output partitions the input
    inst = generate(MixtureConfig(n_samples=300, n_clusters=3, noise_ratio=0.2,
                                  inlier_ratio=0.5), RngStream(1010))
    est = make_estimator("bril:projection")
    est.set_params(random_state=RngStream(7))
    est.fit(inst.points)
    assigned = np.concatenate([g.members for g in est.groups_])
    partition_ok = (
        len(np.unique(assigned)) == len(assigned)
        and sorted(np.concatenate([assigned, est.estimate_.unassigned]).tolist())
        == list(range(300)))
    parts.append(f"group partition: {'ok' if partition_ok else 'BROKEN'}")

    # the hit threshold is strict
    threshold_ok = is_hit(3.0 - 1e-9) and not is_hit(3.0) and not is_hit(3.1)
    parts.append(f"strict hit threshold: {'ok' if threshold_ok else 'BROKEN'}")

    # rigid-motion equivariance of the full pipeline
    ang = 0.7
    rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
    shift = np.array([13.0, -4.0])
    a = make_estimator("bril:mahalanobis")
    a.set_params(random_state=RngStream(3))
    a.fit(inst.points)
    b = make_estimator("bril:mahalanobis")
    b.set_params(random_state=RngStream(3))
    b.fit(inst.points @ rot.T + shift)
    equiv_ok = np.allclose(b.location_, rot @ a.location_ + shift, atol=1e-6)
    parts.append(f"rigid equivariance: {'ok' if equiv_ok else 'BROKEN'}")

    # affine equivariance of the robust subset search
    A = np.array([[2.0, 0.5], [-0.3, 1.2]])
    b_vec = np.array([7.0, -2.0])
    pts = np.random.default_rng(99).normal(size=(40, 2))
    _, sub1 = mcd(pts, rng=RngStream(4))
    _, sub2 = mcd(pts @ A.T + b_vec, rng=RngStream(4))
    parts.append(f"mcd subset affine-invariant: {'ok' if np.array_equal(sub1, sub2) else 'BROKEN'}")
    mcd_ok = np.array_equal(sub1, sub2)

    # p-values stay probabilities
    p_ok = True
    for seed in range(10):
        g = np.random.default_rng(seed)
        r = dip_test(g.normal(size=40))
        p_ok &= 0.0 <= r.p_value <= 1.0
        m = mardia_test(g.normal(size=(30, 2)))
        p_ok &= 0.0 <= m.skew_p_value <= 1.0 and 0.0 <= m.kurtosis_p_value <= 1.0
    parts.append(f"p-values in [0,1]: {'ok' if p_ok else 'BROKEN'}")

    ok = partition_ok and threshold_ok and equiv_ok and mcd_ok and p_ok
    acceptance_record(10, ok, "; ".join(parts))
