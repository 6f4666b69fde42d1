"""Monte Carlo split of predictive variance into epistemic and aleatoric parts.

Given ``M`` conditional fits (one per training-latent sample ``X^(m)``) and,
for a test vector, ``L`` latent draws ``x^(m,l)`` per fit, the variance of a
missing output ``d`` is estimated as

* parameter term: mean over ``(m, l)`` of ``phi^T Cov[theta_d | X^(m)] phi``
  (equal, per ``m``, to ``mu_phi^T C mu_phi + tr(Cov_l[phi] C)``),
* latent term: population variance over all ``M*L`` values of
  ``phi(x^(m,l))^T E[theta_d | X^(m)]``,
* aleatoric term: mean over ``m`` of the noise-variance estimate of fit ``m``.

The latent term pools every draw so that both within-fit and between-fit
spread of the predicted mean are counted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, InsufficientSamples, InvalidConfig
from .latent import TestLatentDraws, TrainedModel

__all__ = ["DimensionUncertainty", "UncertaintyReport", "epistemic", "aleatoric", "report"]


@dataclass(frozen=True)
class DimensionUncertainty:
    predictive_mean: float
    epistemic_param: float
    epistemic_latent: float
    epistemic_total: float
    aleatoric: float
    total: float


@dataclass(frozen=True)
class UncertaintyReport:
    """Per missing dimension (0-based index) uncertainty breakdown."""

    entries: dict[int, DimensionUncertainty]

    def __getitem__(self, d: int) -> DimensionUncertainty:
        return self.entries[d]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def _check_dim(model: TrainedModel, d: int) -> None:
    if not 0 <= d < model.d_y:
        raise IndexOutOfRange(f"output index {d} outside 0..{model.d_y - 1}")


def _mean_predictions(model, phi, d):
    means = np.stack([f.theta_means[d] for f in model.fits])  # (M, J)
    return np.einsum("mlj,mj->ml", phi, means)


def epistemic(model: TrainedModel, draws: TestLatentDraws, d: int) -> tuple[float, float, float]:
    """Return ``(total, term_param, term_latent)`` for output ``d``."""
    _check_dim(model, d)
    if draws.M != model.M:
        raise InvalidConfig(f"draws have {draws.M} groups, model has {model.M} fits")
    if draws.M * draws.L < 2:
        raise InsufficientSamples("need at least two latent draws in total")
    phi = model.basis.features(draws.samples)  # (M, L, J)
    covs = np.stack([f.theta_covs[d] for f in model.fits])  # (M, J, J)
    quad = np.sum((phi @ covs) * phi, axis=-1)
    term_param = max(float(quad.mean()), 0.0)
    g = _mean_predictions(model, phi, d)
    # shifting by one value leaves the variance unchanged and makes a constant set exactly 0
    term_latent = float(np.var(g - g.flat[0]))
    return term_param + term_latent, term_param, term_latent


def aleatoric(model: TrainedModel, d: int) -> float:
    _check_dim(model, d)
    return float(np.mean([f.noise_vars[d] for f in model.fits]))


def report(model: TrainedModel, draws: TestLatentDraws, missing_dims) -> UncertaintyReport:
    missing_dims = [int(d) for d in missing_dims]
    if not missing_dims:
        raise InvalidConfig("no missing dimensions requested")
    phi = model.basis.features(draws.samples)
    entries = {}
    for d in missing_dims:
        total_ep, param, lat = epistemic(model, draws, d)
        ale = aleatoric(model, d)
        entries[d] = DimensionUncertainty(
            predictive_mean=float(_mean_predictions(model, phi, d).mean()),
            epistemic_param=param,
            epistemic_latent=lat,
            epistemic_total=total_ep,
            aleatoric=ale,
            total=total_ep + ale,
        )
    return UncertaintyReport(entries)
