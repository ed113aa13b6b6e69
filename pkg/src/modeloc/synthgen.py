"""Synthetic Gaussian-mixture-plus-uniform-noise benchmark instances.

An instance lives in a fixed square arena.  One *main* cluster (unit
sigma) holds the largest share of the clustered samples, secondary
clusters get random sigmas in [0.5, 1.5], and the remaining samples are
uniform noise over the arena.  Cluster centers are drawn by rejection
sampling so that any two centers are at least ``separation_factor``
times the sum of their sigmas apart.

Counts follow ``|main| = round(N (1-eps) delta)`` and
``|secondary_i| = round(N (1-eps) (1-delta) / (K-1))``; the noise count
absorbs the rounding residual so totals always equal ``N`` (when the
residual is negative, secondary clusters are decremented starting from
the last).  Points are laid out main block first, then each secondary
cluster, then noise, which is also the label order.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import BadParameter, PlacementFailed
from .rng import RngStream, as_stream

MAX_PLACEMENT_ATTEMPTS = 10000


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class MixtureConfig:
    """Parameters of one synthetic mixture cell.

    ``n_clusters=1`` (pure Gaussian plus noise) requires
    ``inlier_ratio=1``.  ``noise_ratio`` may go up to 0.95 to cover
    heavy-contamination sweeps.
    """

    n_samples: int = 500
    n_clusters: int = 3
    noise_ratio: float = 0.0
    inlier_ratio: float = 0.5
    main_sigma: float = 1.0
    secondary_sigma_range: tuple = (0.5, 1.5)
    arena: tuple = (0.0, 50.0)
    separation_factor: float = 3.0
    n_dims: int = 2

    def __post_init__(self):
        if not 1 <= self.n_clusters <= 5:
            raise BadParameter("n_clusters must lie in [1, 5]")
        if not 0.0 <= self.noise_ratio <= 0.95:
            raise BadParameter("noise_ratio must lie in [0, 0.95]")
        if not (1.0 / self.n_clusters) <= self.inlier_ratio <= 1.0:
            raise BadParameter(
                "inlier_ratio must lie in [1/n_clusters, 1] so the main cluster is largest")
        if self.n_clusters == 1 and self.inlier_ratio != 1.0:
            raise BadParameter("a single-cluster mixture requires inlier_ratio = 1")
        if self.n_samples < 1:
            raise BadParameter("n_samples must be positive")
        if self.main_sigma <= 0:
            raise BadParameter("main_sigma must be positive")
        lo, hi = self.secondary_sigma_range
        if not 0 < lo <= hi:
            raise BadParameter("secondary_sigma_range must be an increasing positive pair")
        if self.arena[1] <= self.arena[0]:
            raise BadParameter("arena must be a nonempty interval")
        if self.n_dims < 2:
            raise BadParameter("n_dims must be at least 2")
        counts = self.cardinalities()
        if counts[0] < 1:
            raise BadParameter("main cluster cardinality rounds to zero")
        if any(c < 1 for c in counts[1:-1]):
            raise BadParameter("a secondary cluster cardinality rounds to zero; "
                               "lower inlier_ratio or n_clusters")

    def cardinalities(self) -> tuple:
        """(main, secondary..., noise) sample counts, summing to n_samples."""
        n, k = self.n_samples, self.n_clusters
        clustered = n * (1.0 - self.noise_ratio)
        main = _round_half_up(clustered * self.inlier_ratio)
        if k > 1:
            each = _round_half_up(clustered * (1.0 - self.inlier_ratio) / (k - 1))
            secondary = [each] * (k - 1)
        else:
            secondary = []
        noise = n - main - sum(secondary)
        i = len(secondary) - 1
        while noise < 0 and i >= 0:
            take = min(secondary[i] - 1, -noise)
            secondary[i] -= take
            noise += take
            i -= 1
        if noise < 0:
            raise BadParameter("cluster cardinalities exceed n_samples")
        return (main, *secondary, noise)

    def config_id(self) -> str:
        return (f"N{self.n_samples}_K{self.n_clusters}"
                f"_eps{self.noise_ratio:g}_delta{self.inlier_ratio:g}")

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "n_clusters": self.n_clusters,
            "noise_ratio": self.noise_ratio,
            "inlier_ratio": self.inlier_ratio,
            "main_sigma": self.main_sigma,
            "secondary_sigma_range": list(self.secondary_sigma_range),
            "arena": list(self.arena),
            "separation_factor": self.separation_factor,
            "n_dims": self.n_dims,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MixtureConfig":
        kwargs = dict(data)
        if "secondary_sigma_range" in kwargs:
            kwargs["secondary_sigma_range"] = tuple(kwargs["secondary_sigma_range"])
        if "arena" in kwargs:
            kwargs["arena"] = tuple(kwargs["arena"])
        unknown = set(kwargs) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise BadParameter(f"unknown mixture config fields: {sorted(unknown)}")
        return cls(**kwargs)


@dataclass(frozen=True)
class MixtureInstance:
    points: np.ndarray
    labels: np.ndarray
    true_centers: np.ndarray
    sigmas: np.ndarray
    config: MixtureConfig
    stream: RngStream = field(compare=False)

    @property
    def main_center(self) -> np.ndarray:
        return self.true_centers[0]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([*(f"x{i}" for i in range(1, self.points.shape[1] + 1)), "label"])
            for row, label in zip(self.points, self.labels):
                writer.writerow([*(repr(float(v)) for v in row), label])

    def to_json(self, path) -> None:
        payload = {
            "config": self.config.to_dict(),
            "seed": {"seed": self.stream.seed, "path": list(self.stream.path)},
            "true_centers": self.true_centers.tolist(),
            "sigmas": self.sigmas.tolist(),
            "points": self.points.tolist(),
            "labels": self.labels.tolist(),
        }
        with open(path, "w") as fh:
            json.dump(payload, fh)


def _place_centers(config: MixtureConfig, sigmas, g) -> np.ndarray:
    lo, hi = config.arena
    centers = np.empty((config.n_clusters, config.n_dims))
    attempts = 0
    for i in range(config.n_clusters):
        while True:
            attempts += 1
            if attempts > MAX_PLACEMENT_ATTEMPTS:
                raise PlacementFailed(
                    f"could not place {config.n_clusters} separated centers "
                    f"in {MAX_PLACEMENT_ATTEMPTS} attempts")
            candidate = g.uniform(lo, hi, size=config.n_dims)
            gaps = np.linalg.norm(centers[:i] - candidate, axis=1)
            needed = config.separation_factor * (sigmas[:i] + sigmas[i])
            if np.all(gaps >= needed):
                centers[i] = candidate
                break
    return centers


def generate(config: MixtureConfig, rng=None) -> MixtureInstance:
    """Draw one labeled mixture instance from ``config``.

    Draw order (sigmas, centers, cluster points, noise) is fixed, so an
    identical (config, rng) pair always reproduces the same instance.
    """
    stream = as_stream(rng)
    g = stream.generator()
    k = config.n_clusters
    lo, hi = config.arena

    sigmas = np.empty(k)
    sigmas[0] = config.main_sigma
    if k > 1:
        sigmas[1:] = g.uniform(*config.secondary_sigma_range, size=k - 1)
    centers = _place_centers(config, sigmas, g)

    counts = config.cardinalities()
    blocks = []
    labels = []
    for i in range(k):
        pts = centers[i] + sigmas[i] * g.standard_normal((counts[i], config.n_dims))
        blocks.append(pts)
        labels.extend(["main" if i == 0 else f"cluster-{i}"] * counts[i])
    noise = g.uniform(lo, hi, size=(counts[-1], config.n_dims))
    blocks.append(noise)
    labels.extend(["noise"] * counts[-1])

    return MixtureInstance(
        points=np.vstack(blocks),
        labels=np.array(labels, dtype=object),
        true_centers=centers,
        sigmas=sigmas,
        config=config,
        stream=stream,
    )
