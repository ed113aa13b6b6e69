import json

import numpy as np
import pytest

from modeloc.exceptions import BadParameter, PlacementFailed
from modeloc.rng import RngStream
from modeloc.synthgen import MixtureConfig, MixtureInstance, generate


def test_worked_cardinalities():
    cfg = MixtureConfig(n_samples=500, n_clusters=3, noise_ratio=0.2,
                        inlier_ratio=0.4)
    assert cfg.cardinalities() == (160, 120, 120, 100)


def test_cardinalities_sum_to_n():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(50, 2000))
        k = int(rng.integers(1, 6))
        eps = float(rng.uniform(0.0, 0.5))
        lo = 1.0 if k == 1 else 1.0 / k
        delta = float(rng.uniform(lo, 1.0))
        try:
            cfg = MixtureConfig(n_samples=n, n_clusters=k, noise_ratio=eps,
                                inlier_ratio=delta)
        except BadParameter:
            continue  # a cardinality dropped below 1; rejected by design
        counts = cfg.cardinalities()
        assert sum(counts) == n
        assert all(c >= 1 or c == 0 for c in counts)
        assert counts[0] >= max(counts[1:-1] or (0,))  # main is largest cluster


def test_degenerate_config_rejected():
    # delta = 1 with K = 2 leaves the second cluster empty
    with pytest.raises(BadParameter):
        MixtureConfig(n_samples=500, n_clusters=2, noise_ratio=0.0,
                      inlier_ratio=1.0)


def test_parameter_domains():
    with pytest.raises(BadParameter):
        MixtureConfig(n_clusters=0)
    with pytest.raises(BadParameter):
        MixtureConfig(noise_ratio=-0.1)
    with pytest.raises(BadParameter):
        MixtureConfig(n_clusters=3, inlier_ratio=0.2)  # below 1/K
    with pytest.raises(BadParameter):
        MixtureConfig(n_samples=0)


def test_single_cluster_requires_full_inlier_ratio():
    cfg = MixtureConfig(n_samples=200, n_clusters=1, noise_ratio=0.25,
                        inlier_ratio=1.0)
    counts = cfg.cardinalities()
    assert counts == (150, 50)


def test_generate_reproducible():
    cfg = MixtureConfig(n_samples=300, n_clusters=4, noise_ratio=0.1,
                        inlier_ratio=0.4)
    a = generate(cfg, RngStream(7))
    b = generate(cfg, RngStream(7))
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.labels, b.labels)
    assert np.array_equal(a.true_centers, b.true_centers)
    c = generate(cfg, RngStream(8))
    assert not np.array_equal(a.points, c.points)


def test_generate_label_counts_and_layout():
    cfg = MixtureConfig(n_samples=500, n_clusters=3, noise_ratio=0.2,
                        inlier_ratio=0.4)
    inst = generate(cfg, RngStream(1))
    labels = list(inst.labels)
    assert labels.count("main") == 160
    assert labels.count("cluster-1") == 120
    assert labels.count("cluster-2") == 120
    assert labels.count("noise") == 100
    # contiguous layout: main first, then clusters, then noise
    assert labels[:160] == ["main"] * 160
    assert labels[-100:] == ["noise"] * 100


def test_generate_separation_invariant():
    cfg = MixtureConfig(n_samples=200, n_clusters=5, noise_ratio=0.0,
                        inlier_ratio=0.3)
    for seed in range(10):
        inst = generate(cfg, RngStream(seed))
        centers = inst.true_centers
        sig = inst.sigmas
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                gap = np.linalg.norm(centers[i] - centers[j])
                assert gap >= cfg.separation_factor * (sig[i] + sig[j]) - 1e-9


def test_generate_sigma_ranges():
    cfg = MixtureConfig(n_samples=300, n_clusters=4, noise_ratio=0.0,
                        inlier_ratio=0.4)
    inst = generate(cfg, RngStream(3))
    assert inst.sigmas[0] == 1.0
    assert all(0.5 <= s <= 1.5 for s in inst.sigmas[1:])


def test_generate_main_cluster_mean_near_center():
    cfg = MixtureConfig(n_samples=1000, n_clusters=3, noise_ratio=0.0,
                        inlier_ratio=0.5)
    for seed in range(5):
        inst = generate(cfg, RngStream(100 + seed))
        main = inst.points[inst.labels == "main"]
        tol = 4.0 / np.sqrt(len(main))
        assert np.linalg.norm(main.mean(axis=0) - inst.main_center) < tol


def test_generate_points_inside_arena():
    cfg = MixtureConfig(n_samples=400, n_clusters=3, noise_ratio=0.3,
                        inlier_ratio=0.5)
    inst = generate(cfg, RngStream(4))
    noise = inst.points[inst.labels == "noise"]
    assert np.all(noise >= 0.0) and np.all(noise <= 50.0)


def test_placement_failure_on_tiny_arena():
    cfg = MixtureConfig(n_samples=100, n_clusters=5, noise_ratio=0.0,
                        inlier_ratio=0.3, arena=(0.0, 2.0))
    with pytest.raises(PlacementFailed):
        generate(cfg, RngStream(5))


def test_config_id_and_dict_roundtrip():
    cfg = MixtureConfig(n_samples=500, n_clusters=3, noise_ratio=0.25,
                        inlier_ratio=0.4)
    assert cfg.config_id() == "N500_K3_eps0.25_delta0.4"
    clone = MixtureConfig.from_dict(cfg.to_dict())
    assert clone == cfg


def test_instance_serialization(tmp_path):
    cfg = MixtureConfig(n_samples=60, n_clusters=2, noise_ratio=0.1,
                        inlier_ratio=0.6)
    inst = generate(cfg, RngStream(6))
    csv_path = tmp_path / "inst.csv"
    inst.to_csv(csv_path)
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "x1,x2,label"
    assert len(lines) == 61
    first = lines[1].split(",")
    assert float(first[0]) == inst.points[0, 0]
    assert first[2] == inst.labels[0]

    json_path = tmp_path / "inst.json"
    inst.to_json(json_path)
    payload = json.loads(json_path.read_text())
    assert payload["config"]["n_samples"] == 60
    assert len(payload["points"]) == 60
    assert len(payload["true_centers"]) == 2
    assert isinstance(inst, MixtureInstance)
