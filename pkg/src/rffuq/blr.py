"""Bayesian linear regression in random-feature space.

Each output dimension gets an isotropic Gaussian prior ``N(0, alpha^-1 I)`` on
its weights and an inverse-gamma prior on its noise variance. The two are
fitted by fixed-point alternation: a Gaussian weight posterior given the
current noise estimate, then an inverse-gamma noise posterior given the
expected residual under the weight posterior.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidConfig, NonFinite

__all__ = ["ThetaPosterior", "NoisePosterior", "fit", "fit_all", "posterior_predictive"]


@dataclass(frozen=True, eq=False)
class ThetaPosterior:
    mean: np.ndarray  # (J,)
    covariance: np.ndarray  # (J, J)


@dataclass(frozen=True)
class NoisePosterior:
    shape: float
    rate: float

    @property
    def mean_variance(self) -> float:
        return self.rate / (self.shape - 1.0)


class _SpectralSystem:
    """Eigendecomposition of the Gram matrix, reused across noise levels and outputs."""

    def __init__(self, Phi):
        self.gram = Phi.T @ Phi
        evals, self.evecs = np.linalg.eigh(self.gram)
        self.evals = np.clip(evals, 0.0, None)

    def posterior(self, proj, noise_var, alpha, with_cov=True):
        shrink = 1.0 / (self.evals / noise_var + alpha)
        rotated = self.evecs.T @ proj
        mean = self.evecs @ (shrink * rotated) / noise_var
        cov = None
        if with_cov:
            cov = (self.evecs * shrink) @ self.evecs.T
            cov = 0.5 * (cov + cov.T)
        return mean, shrink, cov


def fit(
    features,
    targets,
    alpha: float = 1.0,
    noise_prior: tuple[float, float] = (2.0, 1.0),
    max_iters: int = 20,
    tol: float = 1e-6,
    noise_variance: float | None = None,
) -> tuple[ThetaPosterior, NoisePosterior]:
    """Fit the weight and noise posteriors for one output dimension.

    Parameters
    ----------
    features : (N, J) array
        Feature matrix; ``N`` may be zero.
    targets : (N,) array
    alpha : float
        Prior precision of the weights.
    noise_prior : (a0, b0)
        Inverse-gamma shape and rate; ``a0 > 1`` so the prior mean exists.
    max_iters, tol
        Fixed-point budget; stops once the relative change of the noise
        estimate drops below ``tol``.
    noise_variance : float, optional
        Pin the noise variance instead of estimating it. The returned noise
        posterior then has shape ``a0 + N/2`` and a rate chosen so its mean
        equals the pinned value.
    """
    Phi = np.asarray(features, dtype=float)
    y = np.asarray(targets, dtype=float)
    if Phi.ndim != 2 or y.ndim != 1 or Phi.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"features {Phi.shape} incompatible with targets {y.shape}")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(Phi))):
        raise NonFinite("features or targets contain NaN/Inf")
    a0, b0 = noise_prior
    if not (alpha > 0 and a0 > 1 and b0 > 0):
        raise InvalidConfig(f"need alpha > 0, a0 > 1, b0 > 0; got {alpha}, {a0}, {b0}")

    N, J = Phi.shape
    if N == 0:
        return ThetaPosterior(np.zeros(J), np.eye(J) / alpha), NoisePosterior(a0, b0)

    return _fit_prepared(_SpectralSystem(Phi), Phi, y, alpha, a0, b0, max_iters, tol, noise_variance)


def _fit_prepared(system, Phi, y, alpha, a0, b0, max_iters, tol, noise_variance):
    N = Phi.shape[0]
    a_n = a0 + 0.5 * N
    proj = Phi.T @ y

    if noise_variance is not None:
        if not noise_variance > 0:
            raise InvalidConfig("pinned noise variance must be positive")
        mean, _, cov = system.posterior(proj, noise_variance, alpha)
        return ThetaPosterior(mean, cov), NoisePosterior(a_n, noise_variance * (a_n - 1.0))

    sigma2 = b0 / (a0 - 1.0)
    b_n = sigma2 * (a_n - 1.0)
    for _ in range(max_iters):
        mean, shrink, _ = system.posterior(proj, sigma2, alpha, with_cov=False)
        resid = y - Phi @ mean
        # sum_n phi_n^T cov phi_n == trace(cov @ gram)
        expected = np.sum(shrink * system.evals)
        b_n = b0 + 0.5 * resid @ resid + 0.5 * expected
        new_sigma2 = b_n / (a_n - 1.0)
        converged = abs(new_sigma2 - sigma2) / new_sigma2 < tol
        sigma2 = new_sigma2
        if converged:
            break
    mean, _, cov = system.posterior(proj, sigma2, alpha)
    return ThetaPosterior(mean, cov), NoisePosterior(a_n, b_n)


def fit_all(
    features,
    Y,
    alpha: float = 1.0,
    noise_prior: tuple[float, float] = (2.0, 1.0),
    max_iters: int = 20,
    tol: float = 1e-6,
) -> tuple[list[ThetaPosterior], list[NoisePosterior]]:
    """Independent :func:`fit` per column of ``Y``, sharing one Gram decomposition."""
    Phi = np.asarray(features, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Phi.ndim != 2 or Phi.shape[0] != Y.shape[0]:
        raise DimensionMismatch(f"features {Phi.shape} incompatible with targets {Y.shape}")
    if Phi.shape[0] == 0:
        pairs = [fit(Phi, Y[:, d], alpha, noise_prior) for d in range(Y.shape[1])]
        return [p[0] for p in pairs], [p[1] for p in pairs]
    if not (np.all(np.isfinite(Y)) and np.all(np.isfinite(Phi))):
        raise NonFinite("features or targets contain NaN/Inf")
    a0, b0 = noise_prior
    if not (alpha > 0 and a0 > 1 and b0 > 0):
        raise InvalidConfig(f"need alpha > 0, a0 > 1, b0 > 0; got {alpha}, {a0}, {b0}")
    system = _SpectralSystem(Phi)
    thetas, noises = [], []
    for d in range(Y.shape[1]):
        theta, noise = _fit_prepared(system, Phi, Y[:, d], alpha, a0, b0, max_iters, tol, None)
        thetas.append(theta)
        noises.append(noise)
    return thetas, noises


def posterior_predictive(theta: ThetaPosterior, noise: NoisePosterior, phi) -> tuple[float, float]:
    """Predictive mean and variance of ``phi @ theta + eps``."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != theta.mean.shape:
        raise DimensionMismatch(f"feature vector {phi.shape} vs weights {theta.mean.shape}")
    mean = float(phi @ theta.mean)
    variance = float(phi @ theta.covariance @ phi) + noise.mean_variance
    return mean, variance
