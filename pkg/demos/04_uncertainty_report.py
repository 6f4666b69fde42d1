"""Split the predictive variance of a missing output into its sources.

epistemic_param : uncertainty in the regression weights
epistemic_latent: uncertainty in where the test point sits in latent space
aleatoric       : observation noise

Run:  python demos/04_uncertainty_report.py
"""

import numpy as np

from rffuq import latent, synthgen, uq
from rffuq.numkit import RngStream

root = RngStream(11)
data = synthgen.generate(150, rng=root.derive("data", 0))
sp = synthgen.split(data, 120)
cfg = latent.ModelConfig(J=30, M=10, L=20)
model = latent.train(sp.train.observations, cfg, root.derive("train", 0))

names = ["linear", "quadratic", "periodic", "step"]
print(f"{'missing':<10} {'param':>8} {'latent':>8} {'aleatoric':>10} {'total':>8}")
for d in range(4):
    totals = []
    for i, y in enumerate(sp.test.observations[:10]):
        obs = [k for k in range(4) if k != d]
        draws = latent.sample_test_latents(model, y[obs], obs, cfg, root.derive("row", i).derive("dim", d))
        totals.append(uq.report(model, draws, [d])[d])
    mean = lambda f: np.mean([getattr(e, f) for e in totals])  # noqa: E731
    print(f"{names[d]:<10} {mean('epistemic_param'):8.3f} {mean('epistemic_latent'):8.3f} {mean('aleatoric'):10.3f} {mean('total'):8.3f}")

# Shrinking every weight covariance shrinks only the parameter term.
shrunk = latent.with_scaled_covariances(model, 0.01)
y = sp.test.observations[0]
draws = latent.sample_test_latents(model, y[:3], [0, 1, 2], cfg, root.derive("row", 0).derive("dim", 3))
a, b = uq.report(model, draws, [3])[3], uq.report(shrunk, draws, [3])[3]
print(f"\nparam term {a.epistemic_param:.4f} -> {b.epistemic_param:.6f} after scaling covariances by 0.01")
