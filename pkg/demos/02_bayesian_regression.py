"""Conjugate Bayesian linear regression on random features, one output at a time.

The weight posterior is Gaussian; the noise variance gets an inverse-gamma
posterior refined by a short fixed-point iteration.

Run:  python demos/02_bayesian_regression.py
"""

import numpy as np

from rffuq import blr
from rffuq.numkit import RngStream
from rffuq.rff import sample_basis

rng = np.random.default_rng(0)
basis = sample_basis(1, 40, 0.7, RngStream(0))
x = rng.uniform(-3, 3, (120, 1))
y = np.sin(2 * x[:, 0]) + 0.3 * rng.standard_normal(120)
Phi = basis.features(x)

theta, noise = blr.fit(Phi, y, alpha=1.0, noise_prior=(2.0, 1.0))
print(f"noise variance estimate {noise.mean_variance:.4f} (true 0.09)")

for x_star in (-2.0, 0.0, 2.5, 6.0):
    phi = basis.features(np.array([x_star]))
    mean, var = blr.posterior_predictive(theta, noise, phi)
    weight_part = phi @ theta.covariance @ phi
    print(f"x*={x_star:+.1f}  mean {mean:+.3f} (truth {np.sin(2 * x_star):+.3f})  var {var:.3f}  from weights {weight_part:.3f}")

# Far from the data the weight term grows: the model knows what it has not seen.

# With the noise pinned, the posterior mean is exactly a ridge solution.
s2 = 0.09
pinned, _ = blr.fit(Phi, y, alpha=1.0, noise_variance=s2)
ridge = np.linalg.solve(Phi.T @ Phi + s2 * np.eye(40), Phi.T @ y)
print("pinned-noise mean vs ridge:", np.abs(pinned.mean - ridge).max())
