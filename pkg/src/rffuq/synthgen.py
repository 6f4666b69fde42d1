"""Four-output synthetic benchmark: linear, squared, periodic and step maps of a 2-d latent."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig
from .numkit import RngStream

__all__ = ["SyntheticDataset", "Split", "generate", "split", "output_maps", "write_csv"]


@dataclass(frozen=True, eq=False)
class SyntheticDataset:
    latents_true: np.ndarray  # (N, 2)
    weights: np.ndarray  # (4, 2)
    observations: np.ndarray  # (N, 4)
    noise_variance: float
    latent_std: float

    @property
    def N(self) -> int:
        return self.observations.shape[0]

    def rows(self, sl: slice) -> "SyntheticDataset":
        return SyntheticDataset(
            self.latents_true[sl], self.weights, self.observations[sl], self.noise_variance, self.latent_std
        )


@dataclass(frozen=True, eq=False)
class Split:
    train: SyntheticDataset
    test: SyntheticDataset


def output_maps(latents, weights) -> np.ndarray:
    """Noise-free outputs, shape (N, 4). A zero step argument takes the -1 branch."""
    a = np.asarray(latents, dtype=float) @ np.asarray(weights, dtype=float).T
    return np.column_stack(
        [
            a[:, 0],
            a[:, 1] ** 2,
            np.sin(a[:, 2]),
            np.where(a[:, 3] > 0, 1.0, -1.0),
        ]
    )


def generate(
    N: int,
    sigma_x: float = 1.0,
    sigma_w: float = 1.0,
    sigma_eps: float = 1.0,
    rng: RngStream | None = None,
    weights=None,
) -> SyntheticDataset:
    """Draw ``N`` observations. Weights are drawn once per dataset unless given."""
    if N < 1:
        raise InvalidConfig(f"N must be positive, got {N}")
    if not (sigma_x > 0 and sigma_w > 0 and sigma_eps >= 0):
        raise InvalidConfig("sigma_x and sigma_w must be positive, sigma_eps nonnegative")
    if rng is None:
        rng = RngStream(0)
    if weights is None:
        weights = sigma_w * rng.standard_normal((4, 2))
    else:
        weights = np.asarray(weights, dtype=float).reshape(4, 2)
    latents = sigma_x * rng.standard_normal((N, 2))
    noise = sigma_eps * rng.standard_normal((N, 4))
    obs = output_maps(latents, weights) + noise
    return SyntheticDataset(latents, weights, obs, float(sigma_eps) ** 2, float(sigma_x))


def split(data: SyntheticDataset, n_train: int) -> Split:
    if not 1 <= n_train < data.N:
        raise InvalidConfig(f"n_train must lie in [1, {data.N - 1}], got {n_train}")
    return Split(data.rows(slice(0, n_train)), data.rows(slice(n_train, None)))


def write_csv(data: SyntheticDataset, path, with_truth: bool = False) -> None:
    header = ["row"] + (["x1_true", "x2_true"] if with_truth else []) + ["y1", "y2", "y3", "y4"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for n in range(data.N):
            values = list(data.latents_true[n]) if with_truth else []
            values += list(data.observations[n])
            writer.writerow([n] + [f"{v:.17g}" for v in values])
