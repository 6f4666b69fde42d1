"""Latent-variable inference for the random-feature GPLVM.

Training finds MAP latents by alternating per-output Bayesian linear
regression fits with gradient ascent on each latent, then wraps every latent
in a Laplace (Gaussian) approximation. ``M`` latent configurations drawn from
those Gaussians, each with its own conditional regression fit, stand in for
posterior samples of the training latents.

At test time a partially observed vector is mapped back to latent space
separately under every conditional fit (multistart ascent on the observed-
dimension log density plus Laplace), and ``L`` latents are drawn per fit.

All heavy lifting goes through a batched objective laid out as
``(G, B, d_x)``: ``G`` indexes conditional fits (Monte Carlo samples) and
``B`` the points optimized against each fit.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.special import gammaln

from . import blr
from .errors import (
    DimensionMismatch,
    DivergedOptimization,
    EmptyObservation,
    InvalidConfig,
    NonFinite,
)
from .numkit import RngStream, cholesky_pd
from .rff import RffBasis, sample_basis

__all__ = [
    "ModelConfig",
    "ConditionalFit",
    "TrainedModel",
    "TestLatentDraws",
    "train",
    "fit_conditional",
    "draw_latent_samples",
    "test_log_density",
    "test_log_density_grad",
    "infer_test_latent",
    "infer_test_latents",
    "sample_test_latents",
    "sample_test_latents_batch",
    "draws_from_laplace",
    "pca_init",
]

log = logging.getLogger(__name__)

_LOG_2PI = np.log(2.0 * np.pi)
_MAX_HALVINGS = 10
_STEP_GROWTH = 1.5
_ONE = np.zeros(1, dtype=int)
# Laplace precision eigenvalues are floored here; only binds away from a mode.
_MIN_PRECISION = 1e-2
_DIVERGENCE_ROUNDS = 5


@dataclass(frozen=True)
class ModelConfig:
    d_x: int = 2
    d_y: int = 4
    J: int = 50
    lengthscale: float = 1.0
    alpha: float = 1.0
    noise_prior: tuple[float, float] = (2.0, 1.0)
    outer_iters: int = 30
    latent_step: float = 0.05
    latent_iters: int = 25
    restarts: int = 5
    M: int = 20
    L: int = 20
    test_iters: int = 100
    fd_step: float = 1e-4
    blr_max_iters: int = 20
    blr_tol: float = 1e-6
    median_lengthscale: bool = False

    def __post_init__(self):
        counts = ("d_x", "d_y", "J", "outer_iters", "latent_iters", "restarts", "M", "L", "test_iters")
        for name in counts:
            if int(getattr(self, name)) < 1:
                raise InvalidConfig(f"{name} must be positive")
        if self.d_x >= self.d_y:
            raise InvalidConfig(f"latent dimension {self.d_x} must be below output dimension {self.d_y}")
        if self.J % 2:
            raise InvalidConfig(f"J must be even, got {self.J}")
        if not (self.latent_step > 0 and self.lengthscale > 0 and self.alpha > 0 and self.fd_step > 0):
            raise InvalidConfig("step sizes, lengthscale and alpha must be positive")
        a0, b0 = self.noise_prior
        if not (a0 > 1 and b0 > 0):
            raise InvalidConfig(f"noise prior needs a0 > 1 and b0 > 0, got {self.noise_prior}")


@dataclass(frozen=True, eq=False)
class ConditionalFit:
    """Posteriors for every output dimension, fitted against one latent configuration."""

    theta_means: np.ndarray  # (d_y, J)
    theta_covs: np.ndarray  # (d_y, J, J)
    noise_shape: np.ndarray  # (d_y,)
    noise_rate: np.ndarray  # (d_y,)

    @classmethod
    def from_posteriors(cls, thetas, noises) -> "ConditionalFit":
        return cls(
            np.stack([t.mean for t in thetas]),
            np.stack([t.covariance for t in thetas]),
            np.array([n.shape for n in noises], dtype=float),
            np.array([n.rate for n in noises], dtype=float),
        )

    @property
    def d_y(self) -> int:
        return self.theta_means.shape[0]

    @property
    def noise_vars(self) -> np.ndarray:
        return self.noise_rate / (self.noise_shape - 1.0)

    def theta(self, d: int) -> blr.ThetaPosterior:
        return blr.ThetaPosterior(self.theta_means[d], self.theta_covs[d])

    def noise(self, d: int) -> blr.NoisePosterior:
        return blr.NoisePosterior(float(self.noise_shape[d]), float(self.noise_rate[d]))


@dataclass(frozen=True, eq=False)
class TrainedModel:
    basis: RffBasis
    map_latents: np.ndarray  # (N, d_x)
    laplace_covs: np.ndarray  # (N, d_x, d_x)
    latent_samples: np.ndarray  # (M, N, d_x)
    fits: tuple[ConditionalFit, ...]
    map_fit: ConditionalFit | None = None
    objective_history: tuple[float, ...] = ()
    config: ModelConfig = field(default_factory=ModelConfig)

    @property
    def M(self) -> int:
        return len(self.fits)

    @property
    def d_y(self) -> int:
        return self.fits[0].d_y

    def stacked(self):
        """``(theta_means (M,d_y,J), theta_covs (M,d_y,J,J), noise_vars (M,d_y))``."""
        return (
            np.stack([f.theta_means for f in self.fits]),
            np.stack([f.theta_covs for f in self.fits]),
            np.stack([f.noise_vars for f in self.fits]),
        )

    def save(self, path) -> None:
        """Write an ``.npz`` snapshot that :meth:`load` restores exactly."""
        means, covs, _ = self.stacked()
        extra = {}
        if self.map_fit is not None:
            extra = {
                "map_theta_means": self.map_fit.theta_means,
                "map_theta_covs": self.map_fit.theta_covs,
                "map_noise_shape": self.map_fit.noise_shape,
                "map_noise_rate": self.map_fit.noise_rate,
            }
        cfg = self.config
        np.savez(
            path,
            frequencies=self.basis.frequencies,
            lengthscale=self.basis.lengthscale,
            map_latents=self.map_latents,
            laplace_covs=self.laplace_covs,
            latent_samples=self.latent_samples,
            theta_means=means,
            theta_covs=covs,
            noise_shape=np.stack([f.noise_shape for f in self.fits]),
            noise_rate=np.stack([f.noise_rate for f in self.fits]),
            objective_history=np.asarray(self.objective_history, dtype=float),
            config_json=np.array(_config_to_json(cfg)),
            **extra,
        )

    @classmethod
    def load(cls, path) -> "TrainedModel":
        with np.load(path) as z:
            fits = tuple(
                ConditionalFit(z["theta_means"][m], z["theta_covs"][m], z["noise_shape"][m], z["noise_rate"][m])
                for m in range(z["theta_means"].shape[0])
            )
            map_fit = None
            if "map_theta_means" in z:
                map_fit = ConditionalFit(
                    z["map_theta_means"], z["map_theta_covs"], z["map_noise_shape"], z["map_noise_rate"]
                )
            return cls(
                basis=RffBasis(z["frequencies"], float(z["lengthscale"])),
                map_latents=z["map_latents"],
                laplace_covs=z["laplace_covs"],
                latent_samples=z["latent_samples"],
                fits=fits,
                map_fit=map_fit,
                objective_history=tuple(z["objective_history"].tolist()),
                config=_config_from_json(str(z["config_json"])),
            )


def _config_to_json(cfg: ModelConfig) -> str:
    return json.dumps(asdict(cfg), sort_keys=True)


def _config_from_json(text: str) -> ModelConfig:
    record = json.loads(text)
    record["noise_prior"] = tuple(record["noise_prior"])
    return ModelConfig(**record)


@dataclass(frozen=True, eq=False)
class TestLatentDraws:
    """Per conditional fit ``m``: optimized latent, Laplace covariance, ``L`` draws."""

    __test__ = False  # not a pytest class

    x_hat: np.ndarray  # (M, d_x)
    covs: np.ndarray  # (M, d_x, d_x)
    samples: np.ndarray  # (M, L, d_x)

    @property
    def M(self) -> int:
        return self.samples.shape[0]

    @property
    def L(self) -> int:
        return self.samples.shape[1]


# ---------------------------------------------------------------------------
# Batched objective


def _objective(basis, X, Y, mask, theta_means, noise_vars, groups, with_grad=True):
    """Observed-dimension Gaussian log density plus standard-normal latent prior.

    Flat layout: X : (P, d_x); Y, mask : (P, d_y); groups : (P,) indices into
    theta_means (G, d_y, J) and noise_vars (G, d_y). Returns values (P,) and
    gradients (P, d_x). Every point is evaluated independently of the others.
    """
    c = basis.amplitude
    proj = X @ basis.frequencies.T
    cos, sin = np.cos(proj), np.sin(proj)
    th = theta_means[groups]
    th_c, th_s = th[..., 0::2], th[..., 1::2]
    f = c * (np.einsum("pk,pdk->pd", cos, th_c) + np.einsum("pk,pdk->pd", sin, th_s))
    inv = 1.0 / noise_vars[groups]
    resid = Y - f
    ll = -0.5 * mask * (_LOG_2PI - np.log(inv) + resid**2 * inv)
    value = ll.sum(axis=-1) - 0.5 * np.sum(X**2, axis=-1) - 0.5 * basis.d_x * _LOG_2PI
    if not with_grad:
        return value, None
    w = mask * resid * inv
    dphase = c * (cos * np.einsum("pd,pdk->pk", w, th_s) - sin * np.einsum("pd,pdk->pk", w, th_c))
    grad = dphase @ basis.frequencies - X
    return value, grad


class _PointProblem:
    """Binds data to :func:`_objective` so that any subset of points can be evaluated."""

    def __init__(self, basis, Y, mask, theta_means, noise_vars, groups):
        self.basis = basis
        self.Y, self.mask = Y, mask
        self.theta_means, self.noise_vars = theta_means, noise_vars
        self.groups = groups

    def __call__(self, X, idx=slice(None), with_grad=True):
        return _objective(
            self.basis, X, self.Y[idx], self.mask[idx], self.theta_means, self.noise_vars, self.groups[idx], with_grad
        )

    def grad(self, X):
        return self(X)[1]


def _fd_hessian(grad_fn, X, h):
    """Central differences of an analytic gradient, symmetrized. X : (P, d_x)."""
    d_x = X.shape[-1]
    H = np.empty(X.shape + (d_x,))
    for i in range(d_x):
        e = np.zeros(d_x)
        e[i] = h
        H[..., :, i] = (grad_fn(X + e) - grad_fn(X - e)) / (2.0 * h)
    return 0.5 * (H + np.swapaxes(H, -1, -2))


def _laplace_covariance(neg_hessian):
    """Invert a batch of negated Hessians into PD covariances, (..., d, d)."""
    evals, evecs = np.linalg.eigh(neg_hessian)
    evals = np.maximum(evals, _MIN_PRECISION)
    covs = (evecs / evals[..., None, :]) @ np.swapaxes(evecs, -1, -2)
    return 0.5 * (covs + np.swapaxes(covs, -1, -2))


def _ascend(fn, X, step, iters, ftol=1e-10):
    """Pointwise gradient ascent with backtracking and step growth.

    ``fn(X_sub, idx) -> (values, grads)`` evaluates the points ``idx`` of a
    flat ``(P, d_x)`` batch. Each point keeps its own step size: a proposal
    that lowers the objective halves the step (at most ``_MAX_HALVINGS``
    times, after which the point stays put for that iteration); an accepted
    one grows it by ``_STEP_GROWTH``. Points stop once an accepted step gains
    less than ``ftol`` (relative), or once no halving helps, so a trajectory
    never depends on its batch neighbours. Values never decrease.
    """
    X = np.array(X, dtype=float)
    P = X.shape[0]
    f, g = fn(X, np.arange(P))
    step = np.broadcast_to(np.asarray(step, dtype=float), (P,)).copy()
    live = np.arange(P)
    for _ in range(iters):
        if live.size == 0:
            break
        x0, f0, g0 = X[live], f[live], g[live]
        t = step[live]
        pending = np.arange(live.size)
        accepted = np.zeros(live.size, dtype=bool)
        xn, fnew, gn = x0.copy(), f0.copy(), g0.copy()
        for _ in range(_MAX_HALVINGS + 1):
            xp = x0[pending] + t[pending, None] * g0[pending]
            fp, gp = fn(xp, live[pending])
            ok = fp >= f0[pending]
            hit = pending[ok]
            xn[hit], fnew[hit], gn[hit] = xp[ok], fp[ok], gp[ok]
            accepted[hit] = True
            pending = pending[~ok]
            if pending.size == 0:
                break
            t[pending] *= 0.5
        gain = fnew - f0
        X[live], f[live], g[live] = xn, fnew, gn
        step[live] = np.where(accepted, t * _STEP_GROWTH, t)
        stop = ~accepted | (gain < ftol * np.maximum(1.0, np.abs(fnew)))
        live = live[~stop]
    return X, f, step


# ---------------------------------------------------------------------------
# Training


def pca_init(Y: np.ndarray, d_x: int) -> np.ndarray:
    """Leading principal-component scores of centered ``Y``, unit variance per coordinate."""
    Yc = Y - Y.mean(axis=0)
    U, S, Vt = np.linalg.svd(Yc, full_matrices=False)
    # Deterministic sign: largest-magnitude loading of each component positive.
    signs = np.sign(Vt[np.arange(d_x), np.argmax(np.abs(Vt[:d_x]), axis=1)])
    signs[signs == 0] = 1.0
    scores = U[:, :d_x] * S[:d_x] * signs
    std = scores.std(axis=0)
    std[std == 0] = 1.0
    return scores / std


def fit_conditional(basis: RffBasis, X: np.ndarray, Y: np.ndarray, config: ModelConfig) -> ConditionalFit:
    thetas, noises = blr.fit_all(
        basis.features(X),
        Y,
        alpha=config.alpha,
        noise_prior=config.noise_prior,
        max_iters=config.blr_max_iters,
        tol=config.blr_tol,
    )
    return ConditionalFit.from_posteriors(thetas, noises)


def _joint_log_density(X, Y, basis, fit: ConditionalFit, config: ModelConfig) -> float:
    mask = np.ones_like(Y)
    groups = np.zeros(len(X), dtype=int)
    vals, _ = _objective(basis, X, Y, mask, fit.theta_means[None], fit.noise_vars[None], groups, with_grad=False)
    J = basis.J
    alpha = config.alpha
    a0, b0 = config.noise_prior
    s2 = fit.noise_vars
    theta_prior = -0.5 * np.sum(alpha * fit.theta_means**2, axis=1) + 0.5 * J * (np.log(alpha) - _LOG_2PI)
    noise_prior = a0 * np.log(b0) - gammaln(a0) - (a0 + 1.0) * np.log(s2) - b0 / s2
    return float(vals.sum() + theta_prior.sum() + noise_prior.sum())


def draw_latent_samples(map_latents, laplace_covs, M: int, rng: RngStream) -> np.ndarray:
    """``M`` draws of the full latent matrix, row ``n`` from ``N(x_n, cov_n)``."""
    map_latents = np.asarray(map_latents, dtype=float)
    N, d_x = map_latents.shape
    lowers = np.stack([cholesky_pd(c).lower for c in laplace_covs])
    z = rng.standard_normal((M, N, d_x))
    return map_latents[None] + np.einsum("nij,mnj->mni", lowers, z)


def train(
    Y,
    config: ModelConfig,
    rng: RngStream,
    basis: RffBasis | None = None,
) -> TrainedModel:
    """Fit the model to ``Y`` (N, d_y) and draw ``config.M`` latent posterior samples.

    Raises
    ------
    NonFinite
        If ``Y`` contains NaN/Inf.
    DivergedOptimization
        If the joint log density drops over ``_DIVERGENCE_ROUNDS`` consecutive
        outer rounds.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[1] != config.d_y:
        raise DimensionMismatch(f"expected (N, {config.d_y}) observations, got {Y.shape}")
    if Y.shape[0] < 2:
        raise InvalidConfig("need at least two training rows")
    if not np.all(np.isfinite(Y)):
        raise NonFinite("training data contain NaN/Inf")

    # Train in a canonical (lexicographic) row order: reductions over rows then
    # see the same operands whatever order Y arrived in, which makes the
    # result exactly equivariant under row permutations. Mapped back below.
    order = np.lexsort(Y.T[::-1])
    back = np.argsort(order)
    Y = Y[order]

    X = pca_init(Y, config.d_x)
    if basis is None:
        basis = sample_basis(config.d_x, config.J, config.lengthscale, rng.derive("basis", 0))
    if basis.d_x != config.d_x:
        raise DimensionMismatch(f"basis d_x {basis.d_x} != config d_x {config.d_x}")
    if config.median_lengthscale:
        diffs = X[:, None, :] - X[None, :, :]
        dists = np.sqrt(np.sum(diffs**2, axis=-1))[np.triu_indices(len(X), k=1)]
        basis = basis.with_lengthscale(float(np.median(dists)))

    mask = np.ones_like(Y)
    groups = np.zeros(Y.shape[0], dtype=int)
    step = np.full(Y.shape[0], config.latent_step)
    history = []
    decreases = 0
    for _ in range(config.outer_iters):
        fit = fit_conditional(basis, X, Y, config)
        problem = _PointProblem(basis, Y, mask, fit.theta_means[None], fit.noise_vars[None], groups)
        X, _, step = _ascend(problem, X, step, config.latent_iters, ftol=0.0)
        history.append(_joint_log_density(X, Y, basis, fit, config))
        if len(history) > 1 and history[-1] < history[-2] - 1e-9 * abs(history[-2]):
            decreases += 1
            if decreases >= _DIVERGENCE_ROUNDS:
                raise DivergedOptimization(
                    f"joint log density fell for {decreases} consecutive rounds "
                    f"(latent_step={config.latent_step})"
                )
        else:
            decreases = 0

    problem = _PointProblem(basis, Y, mask, fit.theta_means[None], fit.noise_vars[None], groups)
    H = _fd_hessian(problem.grad, X, config.fd_step)
    laplace_covs = _laplace_covariance(-H)

    samples = draw_latent_samples(X, laplace_covs, config.M, rng.derive("latent_samples", 0))
    fits = tuple(fit_conditional(basis, samples[m], Y, config) for m in range(config.M))
    log.debug("trained: N=%d J=%d final objective %.6g", len(X), basis.J, history[-1])
    map_fit = fit_conditional(basis, X, Y, config)
    return TrainedModel(
        basis=basis,
        map_latents=X[back],
        laplace_covs=laplace_covs[back],
        latent_samples=samples[:, back],
        fits=fits,
        map_fit=map_fit,
        objective_history=tuple(history),
        config=config,
    )


# ---------------------------------------------------------------------------
# Test-time inference


def _observation(y_obs, obs_dims, d_y):
    obs_dims = np.asarray(obs_dims, dtype=int).reshape(-1)
    y_obs = np.asarray(y_obs, dtype=float).reshape(-1)
    if y_obs.shape[0] != obs_dims.shape[0]:
        raise DimensionMismatch(f"{y_obs.shape[0]} observed values for {obs_dims.shape[0]} dimensions")
    if obs_dims.size and (obs_dims.min() < 0 or obs_dims.max() >= d_y):
        raise DimensionMismatch(f"observed dimensions {obs_dims.tolist()} outside 0..{d_y - 1}")
    if not np.all(np.isfinite(y_obs)):
        raise NonFinite("observed values contain NaN/Inf")
    y = np.zeros(d_y)
    mask = np.zeros(d_y)
    y[obs_dims] = y_obs
    mask[obs_dims] = 1.0
    return y, mask


def test_log_density(x, y_obs, obs_dims, fit: ConditionalFit, basis: RffBasis) -> float:
    """Log density of the observed dimensions at latent ``x`` plus the latent prior."""
    if len(obs_dims) == 0:
        raise EmptyObservation("no observed dimensions")
    y, mask = _observation(y_obs, obs_dims, fit.d_y)
    x = np.asarray(x, dtype=float).reshape(1, -1)
    val, _ = _objective(basis, x, y[None], mask[None], fit.theta_means[None], fit.noise_vars[None], _ONE, False)
    return float(val[0])


def test_log_density_grad(x, y_obs, obs_dims, fit: ConditionalFit, basis: RffBasis) -> np.ndarray:
    if len(obs_dims) == 0:
        raise EmptyObservation("no observed dimensions")
    y, mask = _observation(y_obs, obs_dims, fit.d_y)
    x = np.asarray(x, dtype=float).reshape(1, -1)
    _, g = _objective(basis, x, y[None], mask[None], fit.theta_means[None], fit.noise_vars[None], _ONE)
    return g[0]


test_log_density.__test__ = False
test_log_density_grad.__test__ = False


def infer_test_latents(
    fits,
    basis: RffBasis,
    Y,
    masks,
    config: ModelConfig,
    rngs,
):
    """Batched MAP + Laplace for ``B`` partially observed vectors under ``M`` fits.

    Parameters
    ----------
    fits : sequence of ConditionalFit, length M
    Y, masks : (B, d_y)
        Values (ignored where unobserved) and 0/1 observation masks.
    rngs : sequence of RngStream, length B
        Each row's restart points come from its own stream, drawn as
        ``(M, restarts - 1, d_x)`` standard normals.

    Returns
    -------
    x_hat : (M, B, d_x), covs : (M, B, d_x, d_x)
    """
    Y = np.asarray(Y, dtype=float)
    masks = np.asarray(masks, dtype=float)
    B = Y.shape[0]
    M = len(fits)
    R = config.restarts
    d_x = basis.d_x
    means = np.stack([f.theta_means for f in fits])
    noise = np.stack([f.noise_vars for f in fits])

    starts = np.zeros((M, B, R, d_x))
    if R > 1:
        for b, rng in enumerate(rngs):
            starts[:, b, 1:, :] = rng.standard_normal((M, R - 1, d_x))

    # Flat point order (m, b, r); group index m selects the conditional fit.
    groups = np.repeat(np.arange(M), B * R)
    rows = np.tile(np.repeat(np.arange(B), R), M)
    problem = _PointProblem(basis, Y[rows], masks[rows], means, noise, groups)
    X, f, _ = _ascend(problem, starts.reshape(-1, d_x), config.latent_step, config.test_iters)
    X = X.reshape(M, B, R, d_x)
    best = np.argmax(f.reshape(M, B, R), axis=-1)
    x_hat = np.take_along_axis(X, best[..., None, None], axis=2)[:, :, 0, :]

    groups = np.repeat(np.arange(M), B)
    rows = np.tile(np.arange(B), M)
    problem = _PointProblem(basis, Y[rows], masks[rows], means, noise, groups)
    H = _fd_hessian(problem.grad, x_hat.reshape(-1, d_x), config.fd_step)
    covs = _laplace_covariance(-H).reshape(M, B, d_x, d_x)
    empty = masks.sum(axis=1) == 0
    if empty.any():
        x_hat[:, empty] = 0.0
        covs[:, empty] = np.eye(d_x)
    return x_hat, covs


def infer_test_latent(y_obs, obs_dims, fit: ConditionalFit, basis: RffBasis, config: ModelConfig, rng: RngStream):
    """Single-fit version: returns ``(x_hat, cov)``; the prior ``(0, I)`` if nothing is observed."""
    if len(obs_dims) == 0:
        return np.zeros(basis.d_x), np.eye(basis.d_x)
    y, mask = _observation(y_obs, obs_dims, fit.d_y)
    x_hat, covs = infer_test_latents([fit], basis, y[None], mask[None], config, [rng])
    return x_hat[0, 0], covs[0, 0]


def draws_from_laplace(x_hat, covs, L: int, rng: RngStream) -> TestLatentDraws:
    """``L`` Gaussian draws around each of the ``M`` Laplace approximations."""
    x_hat = np.asarray(x_hat, dtype=float)
    covs = np.asarray(covs, dtype=float)
    M, d_x = x_hat.shape
    lowers = np.stack([cholesky_pd(c).lower for c in covs])
    z = rng.standard_normal((M, L, d_x))
    samples = x_hat[:, None, :] + np.einsum("mij,mlj->mli", lowers, z)
    return TestLatentDraws(x_hat, covs, samples)


def sample_test_latents_batch(model: TrainedModel, Y, masks, config: ModelConfig, rngs) -> list[TestLatentDraws]:
    """Test latent draws for ``B`` partially observed vectors, one stream per vector.

    Each stream is consumed in a fixed order (restart points, then the ``L``
    draws per fit), so a row's output depends only on its own stream.
    """
    rngs = list(rngs)
    x_hat, covs = infer_test_latents(model.fits, model.basis, Y, masks, config, rngs)
    return [draws_from_laplace(x_hat[:, b], covs[:, b], config.L, rng) for b, rng in enumerate(rngs)]


def sample_test_latents(model: TrainedModel, y_obs, obs_dims, config: ModelConfig, rng: RngStream) -> TestLatentDraws:
    y, mask = _observation(y_obs, obs_dims, model.d_y)
    return sample_test_latents_batch(model, y[None], mask[None], config, [rng])[0]


def with_scaled_covariances(model: TrainedModel, eps: float) -> TrainedModel:
    """Copy of ``model`` with every weight covariance multiplied by ``eps``."""
    fits = tuple(replace(f, theta_covs=f.theta_covs * eps) for f in model.fits)
    return replace(model, fits=fits)
