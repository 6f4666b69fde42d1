"""Numerical foundation: robust Cholesky, seeded random streams, Gaussian draws.

Everything stochastic in the package draws from an :class:`RngStream`. Streams
are identified by a root seed and a derivation path of ``(label, index)``
pairs, so a trial, a test row or a Monte Carlo index can each own a stream
whose values do not depend on how much any sibling stream was consumed.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .errors import DimensionMismatch, FactorizationFailure

__all__ = [
    "RngStream",
    "CholFactor",
    "derive_stream",
    "cholesky_pd",
    "sample_gaussian",
    "JITTER_SCHEDULE",
]

# Relative to trace(A) / dim(A).
JITTER_SCHEDULE = (0.0, 1e-10, 1e-8, 1e-6, 1e-4)

_SYMMETRY_TOL = 1e-12


def _label_key(label: str) -> int:
    # Python's hash() is salted per process; a digest is stable across runs.
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little")


class RngStream:
    """A reproducible random stream addressed by ``(root_seed, path)``.

    The underlying generator is a PCG64 seeded through
    :class:`numpy.random.SeedSequence`, with the derivation path folded into
    the spawn key. A stream is meant for a single consumer; to hand
    randomness to independent pieces of work, derive child streams.
    """

    def __init__(self, root_seed: int, path: tuple[tuple[str, int], ...] = ()):
        root_seed = int(root_seed)
        if not 0 <= root_seed < 2**64:
            raise ValueError(f"root_seed must be an unsigned 64-bit integer, got {root_seed}")
        self.root_seed = root_seed
        self.path = tuple((str(label), int(index)) for label, index in path)
        self._generator: np.random.Generator | None = None

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            key = []
            for label, index in self.path:
                key.extend((_label_key(label), index))
            seq = np.random.SeedSequence(entropy=self.root_seed, spawn_key=tuple(key))
            self._generator = np.random.Generator(np.random.PCG64(seq))
        return self._generator

    def derive(self, label: str, index: int) -> "RngStream":
        return RngStream(self.root_seed, self.path + ((label, index),))

    def standard_normal(self, size=None) -> np.ndarray:
        return self.generator.standard_normal(size)

    def normal(self, loc=0.0, scale=1.0, size=None) -> np.ndarray:
        return self.generator.normal(loc, scale, size)

    def __repr__(self) -> str:
        return f"RngStream(root_seed={self.root_seed}, path={self.path!r})"


def derive_stream(parent: RngStream, label: str, index: int) -> RngStream:
    """Child stream of ``parent``; depends only on the parent's address, not its state."""
    return parent.derive(label, index)


@dataclass(frozen=True)
class CholFactor:
    """Lower-triangular factor of ``A + jitter_used * I``."""

    lower: np.ndarray
    jitter_used: float = 0.0

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def covariance(self) -> np.ndarray:
        return self.lower @ self.lower.T

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve ``(A + jitter I) x = b``."""
        return cho_solve((self.lower, True), b)

    def inverse(self) -> np.ndarray:
        inv = self.solve(np.eye(self.dim))
        return 0.5 * (inv + inv.T)


def cholesky_pd(A) -> CholFactor:
    """Cholesky factor of a symmetric matrix with trace-scaled jitter escalation.

    Jitter levels are tried in the order of ``JITTER_SCHEDULE``, each scaled by
    ``trace(A) / dim(A)``; the first level that factorizes is reported in
    ``jitter_used``. An all-zero matrix yields a zero factor (a point mass),
    which lets degenerate covariances flow through :func:`sample_gaussian`.

    Raises
    ------
    DimensionMismatch
        If ``A`` is not square or not symmetric.
    FactorizationFailure
        If every jitter level fails.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    scale = np.max(np.abs(A)) if A.size else 0.0
    if scale > 0 and np.max(np.abs(A - A.T)) > _SYMMETRY_TOL * scale:
        raise DimensionMismatch("matrix is not symmetric")
    if scale == 0.0:
        return CholFactor(np.zeros((n, n)), 0.0)

    A = 0.5 * (A + A.T)
    t = np.trace(A) / n
    eye = np.eye(n)
    for level in JITTER_SCHEDULE:
        jitter = level * t
        if jitter < 0:
            break
        try:
            lower = np.linalg.cholesky(A + jitter * eye if jitter else A)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(lower)):
            return CholFactor(lower, float(jitter))
    raise FactorizationFailure(
        f"Cholesky failed for all jitter levels up to {JITTER_SCHEDULE[-1]:g} * {t:.3g}"
    )


def sample_gaussian(mean, factor: CholFactor, rng: RngStream, size: int | None = None) -> np.ndarray:
    """Draw ``mean + lower @ z`` with ``z`` standard normal.

    With ``size`` given, returns an array of shape ``(size, dim)`` of
    independent draws.
    """
    mean = np.asarray(mean, dtype=float)
    if mean.ndim != 1 or mean.shape[0] != factor.dim:
        raise DimensionMismatch(
            f"mean has shape {mean.shape}, factor has dimension {factor.dim}"
        )
    if size is None:
        z = rng.standard_normal(factor.dim)
        return mean + factor.lower @ z
    z = rng.standard_normal((size, factor.dim))
    return mean + z @ factor.lower.T
