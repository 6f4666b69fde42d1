import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rffuq.errors import DimensionMismatch, FactorizationFailure
from rffuq.numkit import JITTER_SCHEDULE, CholFactor, RngStream, cholesky_pd, derive_stream, sample_gaussian


def _rel_frob(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


# --- cholesky_pd -------------------------------------------------------------


def test_identity_needs_no_jitter():
    f = cholesky_pd(np.eye(2))
    np.testing.assert_array_equal(f.lower, np.eye(2))
    assert f.jitter_used == 0.0


def test_small_pd_matrix_reconstructs():
    A = np.array([[4.0, 2.0], [2.0, 3.0]])
    f = cholesky_pd(A)
    assert _rel_frob(f.lower @ f.lower.T, A) <= 1e-10
    assert np.allclose(np.triu(f.lower, 1), 0.0)
    # hand-computed factor: [[2, 0], [1, sqrt(2)]]
    np.testing.assert_allclose(f.lower, [[2.0, 0.0], [1.0, np.sqrt(2.0)]], atol=1e-15)


def test_singular_matrix_gets_jitter():
    A = np.ones((2, 2))
    f = cholesky_pd(A)
    assert f.jitter_used > 0
    # the reported jitter is the first schedule level that works
    t = np.trace(A) / 2
    assert f.jitter_used in [lvl * t for lvl in JITTER_SCHEDULE]
    assert _rel_frob(f.lower @ f.lower.T, A + f.jitter_used * np.eye(2)) <= 1e-10


def test_jitter_is_smallest_that_succeeds():
    A = np.ones((2, 2))
    f = cholesky_pd(A)
    t = np.trace(A) / 2
    smaller = [lvl * t for lvl in JITTER_SCHEDULE if lvl * t < f.jitter_used]
    for jitter in smaller:
        with pytest.raises(np.linalg.LinAlgError):
            np.linalg.cholesky(A + jitter * np.eye(2))


def test_indefinite_matrix_fails():
    with pytest.raises(FactorizationFailure):
        cholesky_pd(np.array([[1.0, 0.0], [0.0, -1.0]]))


def test_non_square_rejected():
    with pytest.raises(DimensionMismatch):
        cholesky_pd(np.zeros((2, 3)))


def test_asymmetric_rejected():
    with pytest.raises(DimensionMismatch):
        cholesky_pd(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_zero_matrix_gives_zero_factor():
    f = cholesky_pd(np.zeros((3, 3)))
    np.testing.assert_array_equal(f.lower, np.zeros((3, 3)))


@pytest.mark.parametrize("n", [1, 5, 50, 500])
def test_reconstruction_up_to_dim_500(n):
    rng = np.random.default_rng(n)
    B = rng.standard_normal((n, n))
    A = B @ B.T + n * np.eye(n)
    f = cholesky_pd(A)
    assert _rel_frob(f.lower @ f.lower.T, A + f.jitter_used * np.eye(n)) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_reconstruction_property(n, seed, scale):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n + 2))
    A = scale * (B @ B.T)
    f = cholesky_pd(A)
    assert _rel_frob(f.lower @ f.lower.T, A + f.jitter_used * np.eye(n)) <= 1e-10


def test_solve_and_inverse():
    A = np.array([[4.0, 2.0], [2.0, 3.0]])
    f = cholesky_pd(A)
    b = np.array([1.0, -2.0])
    np.testing.assert_allclose(A @ f.solve(b), b, atol=1e-12)
    np.testing.assert_allclose(f.inverse() @ A, np.eye(2), atol=1e-12)


# --- streams -----------------------------------------------------------------


def test_same_path_same_values():
    a = derive_stream(RngStream(5), "trial", 3).standard_normal(20)
    b = derive_stream(RngStream(5), "trial", 3).standard_normal(20)
    np.testing.assert_array_equal(a, b)


def test_sibling_streams_differ():
    root = RngStream(5)
    a = derive_stream(root, "trial", 0).standard_normal(100)
    b = derive_stream(root, "trial", 1).standard_normal(100)
    assert np.any(a != b)


def test_labels_matter():
    root = RngStream(5)
    assert np.any(root.derive("trial", 0).standard_normal(10) != root.derive("test", 0).standard_normal(10))


def test_child_does_not_depend_on_parent_consumption():
    parent = RngStream(9).derive("trial", 2)
    fresh = parent.derive("row", 1).standard_normal(5)
    parent.standard_normal(1000)
    again = parent.derive("row", 1).standard_normal(5)
    np.testing.assert_array_equal(fresh, again)


def test_interleaving_independence():
    root = RngStream(1)
    a, b = root.derive("x", 0), root.derive("y", 0)
    inter = []
    for _ in range(5):
        inter.append(a.standard_normal())
        b.standard_normal(3)
    solo = RngStream(1).derive("x", 0).standard_normal(5)
    np.testing.assert_array_equal(inter, solo)


_CHILD_SCRIPT = (
    "from rffuq.numkit import RngStream, derive_stream;"
    "s = derive_stream(derive_stream(RngStream(12345), 'trial', 3), 'test', 7);"
    "print(','.join(repr(v) for v in s.standard_normal(8)))"
)


def test_reproducible_across_processes():
    outs = [
        subprocess.run([sys.executable, "-c", _CHILD_SCRIPT], capture_output=True, text=True, check=True).stdout
        for _ in range(2)
    ]
    assert outs[0] == outs[1]
    local = derive_stream(derive_stream(RngStream(12345), "trial", 3), "test", 7).standard_normal(8)
    assert outs[0].strip() == ",".join(repr(v) for v in local)


def test_seed_range():
    RngStream(2**64 - 1)
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(2**64)


# --- sample_gaussian ---------------------------------------------------------


def test_zero_factor_returns_mean():
    mean = np.array([1.5, -2.0])
    out = sample_gaussian(mean, CholFactor(np.zeros((2, 2))), RngStream(0))
    np.testing.assert_array_equal(out, mean)


def test_standard_normal_moments():
    draws = sample_gaussian(np.zeros(2), cholesky_pd(np.eye(2)), RngStream(3), size=100_000)
    assert np.all(np.abs(draws.mean(axis=0)) <= 0.02)
    assert np.all(np.abs(draws.var(axis=0) - 1.0) <= 0.05)


def test_empirical_covariance_matches_factor():
    A = np.array([[2.0, 0.8, 0.0], [0.8, 1.0, -0.3], [0.0, -0.3, 0.5]])
    f = cholesky_pd(A)
    draws = sample_gaussian(np.zeros(3), f, RngStream(4), size=10_000)
    emp = np.cov(draws.T)
    target = f.lower @ f.lower.T
    assert np.linalg.norm(emp - target, 2) <= 0.1 * np.linalg.norm(target, 2)


def test_single_draw_matches_definition():
    f = cholesky_pd(np.array([[4.0, 2.0], [2.0, 3.0]]))
    mean = np.array([1.0, 2.0])
    z = RngStream(8).standard_normal(2)
    np.testing.assert_array_equal(sample_gaussian(mean, f, RngStream(8)), mean + f.lower @ z)


def test_sampling_is_deterministic():
    f = cholesky_pd(np.eye(3))
    a = sample_gaussian(np.ones(3), f, RngStream(7), size=4)
    b = sample_gaussian(np.ones(3), f, RngStream(7), size=4)
    np.testing.assert_array_equal(a, b)


def test_sample_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        sample_gaussian(np.zeros(3), cholesky_pd(np.eye(2)), RngStream(0))
