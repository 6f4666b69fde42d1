import math

import numpy as np
import pytest

from rffuq import latent, synthgen, uq
from rffuq.errors import IndexOutOfRange, InsufficientSamples, InvalidConfig
from rffuq.latent import ConditionalFit, ModelConfig, TestLatentDraws, TrainedModel
from rffuq.numkit import RngStream
from rffuq.rff import sample_basis


def _model(fits, basis):
    M = len(fits)
    return TrainedModel(
        basis=basis,
        map_latents=np.zeros((1, basis.d_x)),
        laplace_covs=np.eye(basis.d_x)[None],
        latent_samples=np.zeros((M, 1, basis.d_x)),
        fits=tuple(fits),
    )


def _random_instance(rng, M, L, J, d_y=4):
    basis = sample_basis(2, J, float(rng.uniform(0.5, 2.0)), RngStream(int(rng.integers(2**32))))
    fits = []
    for _ in range(M):
        A = rng.standard_normal((d_y, J, J))
        covs = A @ np.swapaxes(A, 1, 2) / J
        shape = rng.uniform(2.0, 50.0, d_y)
        rate = rng.uniform(0.1, 5.0, d_y) * (shape - 1)
        fits.append(ConditionalFit(rng.standard_normal((d_y, J)), covs, shape, rate))
    samples = rng.standard_normal((M, L, 2))
    draws = TestLatentDraws(samples[:, 0], np.broadcast_to(np.eye(2), (M, 2, 2)).copy(), samples)
    return _model(fits, basis), draws


def _phi_loop(basis, x):
    # independent feature map: explicit loop over frequencies
    out = []
    for w in basis.frequencies:
        a = sum(wi * xi for wi, xi in zip(w, x))
        out += [math.cos(a), math.sin(a)]
    c = math.sqrt(2.0 / basis.J)
    return [c * v for v in out]


def _brute_force(model, draws, d):
    M, L = draws.M, draws.L
    param = 0.0
    g = []
    for m in range(M):
        mean = model.fits[m].theta_means[d]
        cov = model.fits[m].theta_covs[d]
        for ell in range(L):
            phi = _phi_loop(model.basis, draws.samples[m, ell])
            J = len(phi)
            param += sum(phi[i] * cov[i, j] * phi[j] for i in range(J) for j in range(J))
            g.append(sum(phi[i] * mean[i] for i in range(J)))
    param /= M * L
    gbar = sum(g) / len(g)
    latent_term = sum((v - gbar) ** 2 for v in g) / len(g)
    ale = sum(model.fits[m].noise_rate[d] / (model.fits[m].noise_shape[d] - 1) for m in range(M)) / M
    return param + latent_term, param, latent_term, ale, gbar


# --- epistemic ---------------------------------------------------------------


def test_no_spread_gives_zero():
    basis = sample_basis(2, 6, 1.0, RngStream(0))
    fit = ConditionalFit(np.ones((4, 6)), np.zeros((4, 6, 6)), np.full(4, 3.0), np.full(4, 2.0))
    x = np.full((2, 3, 2), 0.4)
    draws = TestLatentDraws(x[:, 0], np.zeros((2, 2, 2)), x)
    assert uq.epistemic(_model([fit, fit], basis), draws, 0) == (0.0, 0.0, 0.0)


def test_isotropic_covariance_single_point():
    basis = sample_basis(2, 10, 1.0, RngStream(1))
    s = 0.37
    fit = ConditionalFit(np.zeros((4, 10)), np.stack([s * np.eye(10)] * 4), np.full(4, 3.0), np.full(4, 2.0))
    x = np.tile([0.2, -1.0], (3, 4, 1))
    total, param, lat = uq.epistemic(_model([fit] * 3, basis), TestLatentDraws(x[:, 0], np.zeros((3, 2, 2)), x), 2)
    assert param == pytest.approx(s, abs=1e-12)
    assert lat == 0.0
    assert total == param


def test_matches_brute_force_small_instance():
    rng = np.random.default_rng(0)
    model, draws = _random_instance(rng, M=3, L=4, J=6)
    for d in range(4):
        total, param, lat = uq.epistemic(model, draws, d)
        bt, bp, bl, _, _ = _brute_force(model, draws, d)
        assert abs(total - bt) <= 1e-10 and abs(param - bp) <= 1e-10 and abs(lat - bl) <= 1e-10


def test_per_m_decomposition_of_param_term():
    # mu_phi^T C mu_phi + tr(Cov_l[phi] C), averaged over m, equals the param term
    rng = np.random.default_rng(1)
    model, draws = _random_instance(rng, M=4, L=6, J=8)
    phi = model.basis.features(draws.samples)
    acc = 0.0
    for m in range(4):
        C = model.fits[m].theta_covs[1]
        mu = phi[m].mean(axis=0)
        cov = np.cov(phi[m].T, bias=True)
        acc += mu @ C @ mu + np.trace(cov @ C)
    assert uq.epistemic(model, draws, 1)[1] == pytest.approx(acc / 4, abs=1e-12)


def test_latent_term_pools_between_fit_spread():
    basis = sample_basis(2, 6, 1.0, RngStream(2))
    fits = [
        ConditionalFit(np.full((4, 6), v), np.zeros((4, 6, 6)), np.full(4, 3.0), np.full(4, 2.0)) for v in (0.0, 1.0)
    ]
    x = np.zeros((2, 5, 2))
    draws = TestLatentDraws(x[:, 0], np.zeros((2, 2, 2)), x)
    # g = 0 for m=0 and sum(phi(0)) = 3 * sqrt(2/6) for m=1: variance of a two-point mixture
    g1 = 3 * np.sqrt(2 / 6)
    assert uq.epistemic(_model(fits, basis), draws, 0)[2] == pytest.approx(g1**2 / 4, rel=1e-12)


def test_epistemic_errors():
    rng = np.random.default_rng(3)
    model, draws = _random_instance(rng, M=2, L=3, J=4)
    with pytest.raises(IndexOutOfRange):
        uq.epistemic(model, draws, 4)
    with pytest.raises(IndexOutOfRange):
        uq.epistemic(model, draws, -1)
    single, one = _random_instance(rng, M=1, L=1, J=4)
    with pytest.raises(InsufficientSamples):
        uq.epistemic(single, one, 0)
    with pytest.raises(InvalidConfig):
        uq.epistemic(model, TestLatentDraws(draws.x_hat[:1], draws.covs[:1], draws.samples[:1]), 0)


# --- aleatoric ---------------------------------------------------------------


def _noise_fits(values):
    return [ConditionalFit(np.zeros((4, 2)), np.zeros((4, 2, 2)), np.full(4, 3.0), np.full(4, 2.0 * v)) for v in values]


def test_aleatoric_constant():
    model = _model(_noise_fits([0.7, 0.7, 0.7]), sample_basis(2, 2, 1.0, RngStream(0)))
    assert uq.aleatoric(model, 3) == pytest.approx(0.7, rel=1e-15)


def test_aleatoric_mean():
    model = _model(_noise_fits([1.0, 3.0]), sample_basis(2, 2, 1.0, RngStream(0)))
    assert uq.aleatoric(model, 0) == 2.0


def test_aleatoric_bad_index():
    model = _model(_noise_fits([1.0]), sample_basis(2, 2, 1.0, RngStream(0)))
    with pytest.raises(IndexOutOfRange):
        uq.aleatoric(model, 7)


# --- report ------------------------------------------------------------------


def test_report_single_draw_no_covariance():
    basis = sample_basis(2, 6, 1.0, RngStream(5))
    fit = ConditionalFit(np.ones((4, 6)), np.zeros((4, 6, 6)), np.full(4, 3.0), np.full(4, 1.0))
    x = np.full((1, 1, 2), 0.3)
    # M*L = 1 is too few for the variance estimator, so use two identical draws
    x2 = np.repeat(x, 2, axis=1)
    rep = uq.report(_model([fit], basis), TestLatentDraws(x[:, 0], np.zeros((1, 2, 2)), x2), [1])
    assert rep[1].total == rep[1].aleatoric == 0.5


def test_report_dimensions_are_independent():
    rng = np.random.default_rng(6)
    model, draws = _random_instance(rng, M=3, L=5, J=8)
    both = uq.report(model, draws, [0, 1])
    one = uq.report(model, draws, [0])
    assert set(both) == {0, 1} and len(one) == 1
    assert both[0] == one[0]


def test_report_matches_brute_force():
    rng = np.random.default_rng(7)
    model, draws = _random_instance(rng, M=2, L=5, J=6)
    rep = uq.report(model, draws, [3])
    bt, bp, bl, ale, mean = _brute_force(model, draws, 3)
    e = rep[3]
    assert abs(e.predictive_mean - mean) <= 1e-10
    assert abs(e.epistemic_param - bp) <= 1e-10 and abs(e.epistemic_latent - bl) <= 1e-10
    assert abs(e.aleatoric - ale) <= 1e-10
    assert e.total == e.epistemic_total + e.aleatoric
    assert e.epistemic_total == e.epistemic_param + e.epistemic_latent


def test_report_requires_dims():
    rng = np.random.default_rng(8)
    model, draws = _random_instance(rng, M=2, L=2, J=4)
    with pytest.raises(InvalidConfig):
        uq.report(model, draws, [])


# --- properties --------------------------------------------------------------


def test_oracle_equivalence_property():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(60):
        M = int(rng.integers(1, 6))
        L = int(rng.integers(max(1, 2 // M + (2 % M > 0)), 50 // M + 1))
        L = min(L, 10)
        if M * L < 2:
            L = 2
        J = 2 * int(rng.integers(1, 6))
        model, draws = _random_instance(rng, M=M, L=L, J=J)
        d = int(rng.integers(4))
        got = uq.epistemic(model, draws, d)
        ref = _brute_force(model, draws, d)
        worst = max(worst, *(abs(a - b) for a, b in zip(got, ref[:3])), abs(uq.aleatoric(model, d) - ref[3]))
    assert worst <= 1e-10


def test_additivity_and_nonnegativity_random():
    rng = np.random.default_rng(10)
    for _ in range(30):
        model, draws = _random_instance(rng, M=int(rng.integers(1, 5)), L=int(rng.integers(2, 8)), J=6)
        rep = uq.report(model, draws, [0, 1, 2, 3])
        for e in rep.entries.values():
            assert e.total == (e.epistemic_param + e.epistemic_latent) + e.aleatoric
            assert e.epistemic_param >= 0 and e.epistemic_latent >= 0 and e.aleatoric > 0


@pytest.fixture(scope="module")
def trained():
    data = synthgen.generate(50, rng=RngStream(12))
    sp = synthgen.split(data, 40)
    cfg = ModelConfig(J=10, M=4, L=6, outer_iters=8)
    return latent.train(sp.train.observations, cfg, RngStream(12)), sp, cfg


def _scaled_epistemic(trained, eps):
    """End to end with training-latent, weight and test-latent covariances all scaled by eps.

    The test-latent centres are the modes under the MAP fit (the eps -> 0 limit), so
    every eps shares them and only the spread varies.
    """
    model, sp, cfg = trained
    Y = sp.train.observations
    samples = latent.draw_latent_samples(model.map_latents, eps * model.laplace_covs, cfg.M, RngStream(1))
    fits = tuple(latent.fit_conditional(model.basis, X, Y, cfg) for X in samples)
    scaled = latent.with_scaled_covariances(
        TrainedModel(model.basis, model.map_latents, eps * model.laplace_covs, samples, fits, config=cfg), eps
    )
    y = sp.test.observations[0]
    mask = np.array([[1.0, 1.0, 1.0, 0.0]])
    x_hat, covs = latent.infer_test_latents([model.map_fit] * cfg.M, model.basis, y[None], mask, cfg, [RngStream(2)])
    draws = latent.draws_from_laplace(x_hat[:, 0], eps * covs[:, 0], cfg.L, RngStream(3))
    return uq.epistemic(scaled, draws, 3)[0]


def test_epistemic_collapses_linearly(trained):
    e = {eps: _scaled_epistemic(trained, eps) for eps in (1.0, 0.1, 0.01)}
    assert e[1.0] > e[0.1] > e[0.01] > 0
    # E(eps) / eps settles to a constant as eps -> 0
    slope_a, slope_b = e[0.1] / 0.1, e[0.01] / 0.01
    assert 0.5 <= slope_b / slope_a <= 2.0


def test_estimator_collapse_is_linear():
    # spread of fit means, weight covariances and latent draws all shrink with sqrt(eps) / eps
    rng = np.random.default_rng(11)
    model, draws = _random_instance(rng, M=5, L=8, J=10)
    base = model.fits[0].theta_means
    centre = draws.samples[:, :1]
    out = {}
    for eps in (1.0, 0.1, 0.01, 1e-4, 1e-6):
        r = np.sqrt(eps)
        fits = [
            ConditionalFit(base + r * (f.theta_means - base), eps * f.theta_covs, f.noise_shape, f.noise_rate)
            for f in model.fits
        ]
        x = centre[:1] + r * (draws.samples - centre[:1])
        d = TestLatentDraws(x[:, 0], eps * draws.covs, x)
        out[eps] = uq.epistemic(_model(fits, model.basis), d, 0)[0] / eps
    assert 0.5 <= out[0.01] / out[0.1] <= 2.0
    # the slope converges at rate sqrt(eps)
    assert out[1e-4] / out[1e-6] == pytest.approx(1.0, abs=0.05)


def test_collapse_of_weight_covariance_term(trained):
    model, sp, cfg = trained
    y = sp.test.observations[1]
    draws = latent.sample_test_latents(model, y[[0, 1, 2]], [0, 1, 2], cfg, RngStream(4))
    base = uq.epistemic(model, draws, 3)[1]
    for eps in (0.1, 0.01):
        scaled = uq.epistemic(latent.with_scaled_covariances(model, eps), draws, 3)[1]
        assert scaled == pytest.approx(eps * base, rel=1e-10)
