"""Uncertainty quantification for random-Fourier-feature GPLVMs.

Modules
-------
numkit    seeded random streams, jittered Cholesky, Gaussian sampling
rff       random Fourier feature basis for the RBF kernel
blr       conjugate Bayesian linear regression in feature space
latent    MAP + Laplace latent inference (training and test time)
uq        epistemic / aleatoric variance decomposition
synthgen  four-output synthetic benchmark
harness   experiment runner, summaries, SVG boxplots and the ``rffuq`` CLI
"""

from . import blr, errors, latent, numkit, rff, synthgen, uq
from .latent import ModelConfig, TestLatentDraws, TrainedModel, sample_test_latents, train
from .numkit import RngStream
from .rff import RffBasis, sample_basis
from .uq import UncertaintyReport, report

__version__ = "0.1.0"

__all__ = [
    "blr",
    "errors",
    "latent",
    "numkit",
    "rff",
    "synthgen",
    "uq",
    "ModelConfig",
    "TestLatentDraws",
    "TrainedModel",
    "RngStream",
    "RffBasis",
    "UncertaintyReport",
    "report",
    "sample_basis",
    "sample_test_latents",
    "train",
]
