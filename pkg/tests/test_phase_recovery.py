import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bornlab.numerics import DimensionError, DomainError, RngStream, haar_unitary
from bornlab.phase_recovery import RecoverySettings, RecoveryStatus, gradient, objective, recover
from bornlab.stochastic import build_sigma, unistochastic_from_unitary

from conftest import random_stochastic

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def brute_force_objective(m, phases):
    """sum_{i,k} |sum_l S_il conj(S_kl) - delta_ik|^2 by explicit loops."""
    n = len(m)
    s = [[np.sqrt(m[i][j]) * complex(np.cos(phases[i][j]), np.sin(phases[i][j])) for j in range(n)] for i in range(n)]
    total = 0.0
    for i in range(n):
        for k in range(n):
            acc = sum(s[i][l] * s[k][l].conjugate() for l in range(n)) - (1.0 if i == k else 0.0)
            total += abs(acc) ** 2
    return total


def finite_difference_gradient(m, phases, h=1e-6):
    g = np.zeros_like(phases)
    for i, j in itertools.product(range(len(m)), repeat=2):
        e = np.zeros_like(phases)
        e[i, j] = h
        g[i, j] = (objective(m, phases + e) - objective(m, phases - e)) / (2 * h)
    return g


def fourier_phases(n):
    j, k = np.meshgrid(range(n), range(n), indexing="ij")
    return 2 * np.pi * j * k / n


def test_objective_examples():
    assert objective(np.eye(3), np.zeros((3, 3))) == 0
    vdw = np.full((3, 3), 1 / 3)
    assert objective(vdw, fourier_phases(3)) < 1e-14
    # S S^† = J (all ones), so S S^† - I has six unit off-diagonal entries
    oracle = brute_force_objective(vdw, np.zeros((3, 3)))
    assert abs(oracle - 6.0) < 1e-12
    assert abs(objective(vdw, np.zeros((3, 3))) - oracle) < 1e-12
    with pytest.raises(DimensionError):
        objective(np.eye(2), np.zeros((3, 3)))


@given(n=st.integers(2, 5), seed=seeds)
def test_objective_matches_brute_force(n, seed):
    gen = np.random.default_rng(seed)
    m = random_stochastic(n, gen)
    ph = gen.uniform(0, 2 * np.pi, (n, n))
    assert abs(objective(m, ph) - brute_force_objective(m.tolist(), ph.tolist())) < 1e-12


def test_gradient_vanishes_at_unitary_point():
    u = haar_unitary(4, RngStream(4))
    assert np.linalg.norm(gradient(np.abs(u) ** 2, np.angle(u))) < 1e-12


def test_gradient_matches_finite_differences_3x3(gen):
    m = random_stochastic(3, gen)
    ph = gen.uniform(0, 2 * np.pi, (3, 3))
    g = gradient(m, ph)
    fd = finite_difference_gradient(m, ph)
    assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(fd)


@given(n=st.integers(2, 5), seed=seeds, row=st.booleans(), index=st.integers(0, 4), shift=st.floats(-7, 7))
def test_gauge_invariance(n, seed, row, index, shift):
    gen = np.random.default_rng(seed)
    m = random_stochastic(n, gen)
    ph = gen.uniform(0, 2 * np.pi, (n, n))
    direction = np.zeros_like(ph)
    if row:
        direction[index % n, :] = 1.0
    else:
        direction[:, index % n] = 1.0
    assert abs(objective(m, ph) - objective(m, ph + shift * direction)) < 1e-14
    # directional derivative along the gauge direction vanishes
    assert abs(np.sum(gradient(m, ph) * direction)) < 1e-12


def test_recover_haar_4x4():
    m = unistochastic_from_unitary(haar_unitary(4, RngStream(40)))
    res = recover(m, rng=RngStream(2))
    assert res.status is RecoveryStatus.SUCCESS
    assert res.objective < 1e-10
    np.testing.assert_allclose(np.abs(res.witness) ** 2, m, atol=1e-8)
    assert np.linalg.norm(res.witness @ res.witness.conj().T - np.eye(4)) < 1e-8
    np.testing.assert_allclose(res.phases[0], 0)
    np.testing.assert_allclose(res.phases[:, 0], 0)


def test_recover_circulant_exhausted():
    m = np.array([[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]])
    res = recover(m, RecoverySettings(restarts=5))
    assert res.status is RecoveryStatus.EXHAUSTED
    assert res.restarts_used == 5 and res.witness is None
    assert res.objective > 0.1


def test_recover_permutations_one_restart():
    for n in (2, 3, 4, 5):
        p = np.eye(n)[np.roll(np.arange(n), 1)]
        res = recover(p, rng=RngStream(n))
        assert res.status is RecoveryStatus.SUCCESS and res.restarts_used == 1


def test_recover_rejects_non_bistochastic():
    res = recover([[1, 0], [0.5, 0.5]])
    assert res.status is RecoveryStatus.REJECTED
    assert "not bistochastic" in res.reason
    with pytest.raises(DomainError):
        recover([[0.7, 0.4], [0.2, 0.8]])


def test_recover_deterministic():
    m = unistochastic_from_unitary(haar_unitary(5, RngStream(77)))
    a = recover(m, rng=RngStream(3))
    b = recover(m, rng=RngStream(3))
    assert a.restarts_used == b.restarts_used
    np.testing.assert_array_equal(a.witness, b.witness)


def test_settings_validation():
    with pytest.raises(ValueError):
        RecoverySettings(restarts=0)
    with pytest.raises(ValueError):
        RecoverySettings(success_threshold=0)


@given(n=st.integers(3, 5), seed=seeds)
def test_success_witness_sound(n, seed):
    m = unistochastic_from_unitary(haar_unitary(n, RngStream(seed)))
    res = recover(m, rng=RngStream(seed))
    if res.status is RecoveryStatus.SUCCESS:
        w = res.witness
        assert np.linalg.norm(w @ w.conj().T - np.eye(n)) < 1e-8
        assert np.max(np.abs(np.abs(w) ** 2 - m)) < 1e-8
        np.testing.assert_allclose(w, build_sigma(m, res.phases), atol=1e-15)
