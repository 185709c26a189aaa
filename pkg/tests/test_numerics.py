import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bornlab.numerics import (
    DimensionError,
    DomainError,
    RngStream,
    frobenius_distance,
    haar_unitary,
    hermitian_eig,
    is_unitary,
    is_unitary_by_singular_values,
    svd,
    unitarity_defect,
)

from conftest import random_stochastic

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def ginibre(n, seed):
    g = np.random.default_rng(seed)
    return g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))


def test_svd_identity():
    np.testing.assert_allclose(svd(np.eye(3)).singular_values, [1, 1, 1], atol=1e-15)


def test_svd_diagonal_with_zero():
    res = svd(np.diag([2.0, 1.0, 0.0]))
    np.testing.assert_allclose(res.singular_values, [2, 1, 0], atol=1e-15)
    assert is_unitary(res.u) and is_unitary(res.v)


def test_svd_zero_phase_sigma_squares_sum_to_n(gen):
    m = random_stochastic(3, gen)
    s = svd(np.sqrt(m)).singular_values
    # oracle: sum of |entries|^2 = sum of the probabilities = 3 rows * 1
    assert abs(np.sum(s**2) - m.sum()) < 1e-12
    assert abs(np.sum(s**2) - 3.0) < 1e-12


@given(n=st.integers(2, 8), seed=seeds, rank_drop=st.booleans())
def test_svd_reconstructs_and_matches_lapack(n, seed, rank_drop):
    m = ginibre(n, seed)
    if rank_drop:
        m[:, -1] = m[:, 0]
    res = svd(m)
    assert frobenius_distance(res.reconstruct(), m) < 1e-10
    assert unitarity_defect(res.u) < 1e-10 and unitarity_defect(res.v) < 1e-10
    assert np.all(np.diff(res.singular_values) <= 0) and np.all(res.singular_values >= 0)
    np.testing.assert_allclose(res.singular_values, np.linalg.svd(m, compute_uv=False), atol=1e-10)


def test_svd_errors():
    with pytest.raises(DimensionError):
        svd(np.ones((2, 3)))
    with pytest.raises(DomainError):
        svd(np.array([[1.0, np.nan], [0.0, 1.0]]))


@given(n=st.integers(2, 6), seed=seeds)
def test_unitary_iff_singular_values_one_on_haar(n, seed):
    u = haar_unitary(n, RngStream(seed))
    assert is_unitary(u, 1e-10)
    assert is_unitary_by_singular_values(u, 1e-9)


@given(n=st.integers(2, 6), seed=seeds, scale=st.sampled_from([1 + 1e-3, 1 - 1e-3, 1.5, 0.5]))
def test_unitary_iff_singular_values_one_on_scaled(n, seed, scale):
    u = haar_unitary(n, RngStream(seed))
    m = u.copy()
    m[:, 0] *= scale
    assert not is_unitary(m, 1e-10)
    assert not is_unitary_by_singular_values(m, 1e-9)


def test_hermitian_eig_examples():
    w, v = hermitian_eig(np.eye(2))
    np.testing.assert_allclose(w, [1, 1])
    w, _ = hermitian_eig(np.diag([1.0, -1.0]))
    np.testing.assert_allclose(w, [-1, 1])
    p = np.full((2, 2), 0.5)
    # trace 1, det 0: characteristic polynomial l^2 - l
    w, v = hermitian_eig(p)
    np.testing.assert_allclose(w, np.sort(np.roots([1, -np.trace(p), np.linalg.det(p)]).real), atol=1e-12)
    np.testing.assert_allclose(w, [0, 1], atol=1e-12)
    assert frobenius_distance(v.conj().T @ v, np.eye(2)) < 1e-10


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(DomainError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_haar_n1_unit_modulus():
    u = haar_unitary(1, RngStream(5))
    assert u.shape == (1, 1) and abs(abs(u[0, 0]) - 1) < 1e-15


def test_haar_fixed_seed_unitary_and_reproducible():
    u = haar_unitary(4, RngStream(11, 3))
    assert unitarity_defect(u) < 1e-12
    np.testing.assert_array_equal(u, haar_unitary(4, RngStream(11, 3)))
    assert not np.array_equal(u, haar_unitary(4, RngStream(11, 4)))


def test_haar_many_draws_unitary():
    gen = RngStream(1).generator()
    for n in range(2, 7):
        for _ in range(1000):
            assert unitarity_defect(haar_unitary(n, gen)) < 1e-12


def test_haar_second_moment():
    # E|U_11|^2 = 1/n under the Haar measure
    gen = RngStream(2).generator()
    vals = [abs(haar_unitary(3, gen)[0, 0]) ** 2 for _ in range(10_000)]
    assert abs(np.mean(vals) - 1 / 3) < 0.01


def test_frobenius_distance_examples():
    assert frobenius_distance(np.eye(2), np.eye(2)) == 0
    assert frobenius_distance(np.diag([1.0, 0.0]), np.zeros((2, 2))) == 1
    # each diagonal entry differs by |1 - i| = sqrt(2)
    assert abs(frobenius_distance(np.eye(2), 1j * np.eye(2)) - 2.0) < 1e-15
    with pytest.raises(DimensionError):
        frobenius_distance(np.eye(2), np.eye(3))


def test_rng_stream_substreams_distinct_and_stable():
    r = RngStream(7, 1)
    a = r.substream(0).generator().random(4)
    np.testing.assert_array_equal(a, RngStream(7, 1).substream(0).generator().random(4))
    assert not np.array_equal(a, r.substream(1).generator().random(4))
    with pytest.raises(ValueError):
        RngStream(-1)
