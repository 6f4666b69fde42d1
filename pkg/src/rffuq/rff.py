"""Random Fourier features for the RBF kernel.

The feature map uses an interleaved layout::

    phi(x) = sqrt(2/J) * [cos(w_1.x), sin(w_1.x), ..., cos(w_K.x), sin(w_K.x)]

with ``K = J/2`` frequencies drawn from ``N(0, lengthscale**-2 I)``, so that
``phi(x) @ phi(x')`` is an unbiased estimate of
``exp(-|x - x'|**2 / (2 lengthscale**2))`` and ``|phi(x)|**2 == 1`` exactly.
The layout is part of the serialization format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidConfig
from .numkit import RngStream

__all__ = [
    "RffBasis",
    "sample_basis",
    "features",
    "features_jacobian",
    "kernel_estimate",
    "rbf_kernel",
    "expected_features",
    "expected_feature_outer",
]


@dataclass(frozen=True, eq=False)
class RffBasis:
    frequencies: np.ndarray  # (J/2, d_x)
    lengthscale: float

    def __post_init__(self):
        freqs = np.array(self.frequencies, dtype=float)
        if freqs.ndim != 2 or freqs.shape[0] < 1:
            raise InvalidConfig(f"frequencies must be a non-empty 2-d array, got {freqs.shape}")
        if not self.lengthscale > 0:
            raise InvalidConfig(f"lengthscale must be positive, got {self.lengthscale}")
        freqs.setflags(write=False)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "lengthscale", float(self.lengthscale))

    @property
    def J(self) -> int:
        return 2 * self.frequencies.shape[0]

    @property
    def d_x(self) -> int:
        return self.frequencies.shape[1]

    @property
    def amplitude(self) -> float:
        return np.sqrt(2.0 / self.J)

    def with_lengthscale(self, lengthscale: float) -> "RffBasis":
        """Same underlying normal draws, rescaled to a new lengthscale."""
        return RffBasis(self.frequencies * (self.lengthscale / lengthscale), lengthscale)

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.d_x:
            raise DimensionMismatch(f"latent dimension {X.shape[-1]} != basis d_x {self.d_x}")
        return X

    def phases(self, X) -> np.ndarray:
        return self._check(X) @ self.frequencies.T

    def features(self, X) -> np.ndarray:
        """Feature map for one latent ``(d_x,)`` or a batch ``(..., d_x)``."""
        proj = self.phases(X)
        out = np.stack((np.cos(proj), np.sin(proj)), axis=-1)
        return self.amplitude * out.reshape(proj.shape[:-1] + (self.J,))

    def jacobian(self, X) -> np.ndarray:
        """d phi / d x, shape ``(..., J, d_x)``."""
        proj = self.phases(X)
        c = self.amplitude
        rows = np.stack((-c * np.sin(proj), c * np.cos(proj)), axis=-1)
        rows = rows.reshape(proj.shape[:-1] + (self.J,))
        freqs = np.repeat(self.frequencies, 2, axis=0)
        return rows[..., :, None] * freqs

    def pair_frequencies(self):
        """``(w_i - w_j, w_i + w_j)`` for all frequency pairs, each ``(K, K, d_x)``."""
        cached = self.__dict__.get("_pairs")
        if cached is None:
            W = self.frequencies
            cached = (W[:, None, :] - W[None, :, :], W[:, None, :] + W[None, :, :])
            object.__setattr__(self, "_pairs", cached)
        return cached

    def to_dict(self) -> dict:
        return {
            "J": self.J,
            "lengthscale": self.lengthscale,
            "d_x": self.d_x,
            "frequencies": self.frequencies.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, record: dict) -> "RffBasis":
        freqs = np.asarray(record["frequencies"], dtype=float)
        J = int(record["J"])
        if J % 2 or freqs.size % (J // 2):
            raise InvalidConfig("frequency record does not match J")
        return cls(freqs.reshape(J // 2, -1), float(record["lengthscale"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "RffBasis":
        return cls.from_dict(json.loads(text))


def sample_basis(d_x: int, J: int, lengthscale: float, rng: RngStream) -> RffBasis:
    """Draw ``J/2`` frequencies from the RBF spectral density."""
    if J < 2 or J % 2:
        raise InvalidConfig(f"J must be an even integer >= 2, got {J}")
    if d_x < 1:
        raise InvalidConfig(f"d_x must be positive, got {d_x}")
    if not lengthscale > 0:
        raise InvalidConfig(f"lengthscale must be positive, got {lengthscale}")
    omega = rng.standard_normal((J // 2, d_x)) / lengthscale
    return RffBasis(omega, lengthscale)


def _damping(freqs, S):
    # exp(-w^T S w / 2) for every frequency row; freqs (..., d_x), S (B, d_x, d_x)
    quad = np.einsum("...a,bac,...c->b...", freqs, S, freqs)
    return np.exp(-0.5 * quad)


def expected_features(basis: RffBasis, mu, S) -> np.ndarray:
    """``E[phi(x)]`` for ``x ~ N(mu, S)``; mu (B, d_x), S (B, d_x, d_x) -> (B, J).

    Uses ``E[cos(w.x)] = cos(w.mu) exp(-w^T S w / 2)`` and likewise for sin.
    """
    mu = basis._check(mu)
    S = np.asarray(S, dtype=float)
    proj = mu @ basis.frequencies.T
    damp = _damping(basis.frequencies, S)
    out = np.stack((np.cos(proj) * damp, np.sin(proj) * damp), axis=-1)
    return basis.amplitude * out.reshape(proj.shape[:-1] + (basis.J,))


def _pair_moments(basis, mu, S):
    """E[cos], E[sin] of the difference and sum phases, each (B, K, K)."""
    Dm, Dp = basis.pair_frequencies()
    out = []
    for D in (Dm, Dp):
        phase = np.einsum("bd,kld->bkl", mu, D)
        damp = _damping(D, S)
        out.append((np.cos(phase) * damp, np.sin(phase) * damp))
    return out


def expected_feature_outer(basis: RffBasis, mu, S) -> np.ndarray:
    """``E[phi(x) phi(x)^T]`` for ``x ~ N(mu, S)``, shape (B, J, J)."""
    mu = basis._check(mu)
    S = np.asarray(S, dtype=float)
    (cm, sm), (cp, sp) = _pair_moments(basis, mu, S)
    B, K = mu.shape[0], basis.J // 2
    out = np.empty((B, K, 2, K, 2))
    out[:, :, 0, :, 0] = 0.5 * (cm + cp)  # cos_i cos_j
    out[:, :, 1, :, 1] = 0.5 * (cm - cp)  # sin_i sin_j
    out[:, :, 0, :, 1] = 0.5 * (sp - sm)  # cos_i sin_j
    out[:, :, 1, :, 0] = 0.5 * (sp + sm)  # sin_i cos_j
    return (basis.amplitude**2) * out.reshape(B, basis.J, basis.J)


def features(basis: RffBasis, x) -> np.ndarray:
    return basis.features(x)


def features_jacobian(basis: RffBasis, x) -> np.ndarray:
    return basis.jacobian(x)


def kernel_estimate(basis: RffBasis, x, x_prime) -> float:
    return float(basis.features(x) @ basis.features(x_prime))


def rbf_kernel(x, x_prime, lengthscale: float = 1.0) -> float:
    """Closed-form RBF kernel with unit amplitude."""
    diff = np.asarray(x, dtype=float) - np.asarray(x_prime, dtype=float)
    return float(np.exp(-0.5 * np.dot(diff, diff) / lengthscale**2))
