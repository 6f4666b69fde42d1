"""Train the latent-variable model and recover a missing output of a test vector.

Training finds MAP latents for the observations, a Laplace covariance per
latent, and refits the regression for M latent samples. At test time the
observed outputs pin down a posterior over the latent point.

Run:  python demos/03_latent_model.py
"""

import numpy as np

from rffuq import latent, synthgen
from rffuq.numkit import RngStream

root = RngStream(7)
data = synthgen.generate(200, rng=root.derive("data", 0))
sp = synthgen.split(data, 160)

cfg = latent.ModelConfig(J=50, M=10, L=20)
model = latent.train(sp.train.observations, cfg, root.derive("train", 0))
print("trained:", model.M, "posterior samples of", model.map_latents.shape, "latents")
print("noise variance per output (mean over fits):", np.round(np.mean([f.noise_vars for f in model.fits], axis=0), 3))
# The generator's noise variance is 1 for every output. A 2-d MAP latent can
# absorb a smooth output exactly, driving its noise estimate towards 0; see
# "Known limitations" in the README.

# Hide y3 (0-based index 2) of the first test row and infer it from the rest.
y = sp.test.observations[0]
draws = latent.sample_test_latents(model, y[[0, 1, 3]], [0, 1, 3], cfg, root.derive("test", 0))
print("test latent draws:", draws.samples.shape, "(M, L, d_x)")

phi = model.basis.features(draws.samples)
preds = np.einsum("mlj,mj->ml", phi, np.stack([f.theta_means[2] for f in model.fits]))
print(f"y3 observed {y[2]:+.3f}, predicted {preds.mean():+.3f} +/- {preds.std():.3f} (latent spread only)")
