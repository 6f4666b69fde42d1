"""Random Fourier features: how well phi(x)^T phi(x') tracks the RBF kernel.

Run:  python demos/01_feature_map.py
"""

import numpy as np

from rffuq.numkit import RngStream
from rffuq.rff import features_jacobian, kernel_estimate, rbf_kernel, sample_basis

rng = np.random.default_rng(0)
x = rng.uniform(-2, 2, (200, 2))
x_prime = x + rng.uniform(-1.5, 1.5, (200, 2))
exact = np.array([rbf_kernel(a, b) for a, b in zip(x, x_prime)])

print("J      mean |k_hat - k|")
for J in (10, 50, 200, 1000, 4000):
    basis = sample_basis(2, J, 1.0, RngStream(1).derive("J", J))
    approx = np.array([kernel_estimate(basis, a, b) for a, b in zip(x, x_prime)])
    print(f"{J:<6d} {np.abs(approx - exact).mean():.4f}")

# Every feature vector has unit norm, so the self-kernel is exact for any J.
basis = sample_basis(2, 10, 1.0, RngStream(2))
phi = basis.features(x)
print("\nmax | |phi(x)|^2 - 1 | at J=10:", np.abs((phi**2).sum(axis=1) - 1).max())

# The Jacobian drives every latent-space gradient in the package.
x0 = np.array([0.3, -0.7])
jac = features_jacobian(basis, x0)
h = 1e-6
fd = np.stack([(basis.features(x0 + h * e) - basis.features(x0 - h * e)) / (2 * h) for e in np.eye(2)], axis=1)
print("Jacobian shape", jac.shape, "max FD discrepancy", np.abs(jac - fd).max())
