"""Greedy detector unit tests: closed forms, selection rules, rank-one updates,
full-loop behavior, and the algebraic invariances of the sweep."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clmp.detector import (
    MaxSelections,
    PowerThreshold,
    clmp_detect,
    clmp_detect_reference,
    epsilon,
    gamma_candidate,
    init_state,
    select_atom,
    update_b,
)
from clmp.oracle import direct_b, golden_minimize_gamma, negative_llf

from synth import make_pilots, partial_covariance, simulated_scm


# ---------------------------------------------------------------------------
# gamma_candidate


def test_gamma_zero_on_noise_only_covariance():
    rng = np.random.default_rng(0)
    a = make_pilots(rng, 8, 20, kind="bernoulli")
    sigma2 = 1.4
    state = init_state(a, sigma2)
    s_hat = sigma2 * np.eye(8)
    for i in range(20):
        assert gamma_candidate(s_hat, a[:, i], state.b[:, i]) == 0.0


def test_gamma_recovers_single_atom_power_exactly():
    rng = np.random.default_rng(1)
    a = make_pilots(rng, 16, 64, kind="bernoulli")
    sigma2, g_true = 1.0, 3.0
    s_hat = sigma2 * np.eye(16) + g_true * np.outer(a[:, 1], a[:, 1].conj())
    state = init_state(a, sigma2)
    assert gamma_candidate(s_hat, a[:, 1], state.b[:, 1]) == pytest.approx(g_true, abs=1e-12)


def test_gamma_matches_golden_section_minimizer():
    rng = np.random.default_rng(2)
    for _ in range(25):
        l = int(rng.integers(4, 9))
        a = make_pilots(rng, l, 3 * l)
        sigma2 = float(10 ** rng.uniform(-0.3, 0.3))
        sigma_rest, _ = partial_covariance(rng, a, sigma2, int(rng.integers(0, 3)))
        s_hat, _, _ = simulated_scm(rng, a, 2 * l, sigma2, 2)
        i = int(rng.integers(0, a.shape[1]))
        b_i = np.linalg.solve(sigma_rest, a[:, i])
        g_closed = gamma_candidate(s_hat, a[:, i], b_i)
        g_gold = golden_minimize_gamma(sigma_rest, a[:, i], s_hat, 1.0)
        assert g_closed == pytest.approx(g_gold, rel=1e-6, abs=1e-7)


def test_gamma_candidate_rejects_nan_and_floors_degenerate():
    rng = np.random.default_rng(3)
    a = make_pilots(rng, 6, 6)
    with pytest.raises(ValueError):
        gamma_candidate(np.eye(6), a[:, 0] * np.nan, a[:, 0])
    # a degenerate atom (a^H b below the floor) contributes nothing
    assert gamma_candidate(np.eye(6), a[:, 0], np.zeros(6, dtype=complex)) == 0.0


# ---------------------------------------------------------------------------
# epsilon / select_atom


def test_epsilon_known_values():
    assert epsilon(0.0, 5.0) == 0.0
    assert epsilon(1.0, 1.0) == pytest.approx(math.log(2.0) - 1.0, abs=1e-12)
    with pytest.raises(ValueError):
        epsilon(-0.1, 1.0)
    with pytest.raises(ValueError):
        epsilon(0.5, 0.0)


@given(gamma=st.floats(0.0, 1e6), ab=st.floats(1e-9, 1e6))
@settings(max_examples=200, deadline=None)
def test_epsilon_never_positive(gamma, ab):
    val = epsilon(gamma, ab)
    assert val <= 0.0
    if gamma > 0.0 and gamma * ab > 1e-12:
        assert val < 0.0


def test_select_atom_min_and_ties():
    assert select_atom({2: -0.5, 7: -0.1}) == 2
    assert select_atom({3: -0.2, 5: -0.2}) == 3
    assert select_atom({1: 0.0, 2: 0.0, 3: 0.0}) == 1
    with pytest.raises(ValueError):
        select_atom({})


# ---------------------------------------------------------------------------
# update_b


def test_update_b_zero_power_is_identity():
    rng = np.random.default_rng(4)
    a = make_pilots(rng, 4, 10)
    state = init_state(a, 1.0)
    new = update_b(state, 3, 0.0)
    assert np.array_equal(new.b, state.b)
    assert new.support == [3]


def test_update_b_matches_direct_inverse_after_two_updates():
    rng = np.random.default_rng(5)
    a = make_pilots(rng, 4, 10)
    sigma2 = 0.8
    state = init_state(a, sigma2)
    gamma = np.zeros(10)
    for i_k, g in [(2, 1.3), (7, 0.4)]:
        state = update_b(state, i_k, g)
        gamma[i_k] = g
        ref = direct_b(a, gamma, sigma2)
        assert np.max(np.abs(state.b - ref)) / np.max(np.abs(ref)) < 1e-10
    assert state.support == [2, 7]
    assert state.iteration == 2


def test_update_b_rejects_reselection_and_corrupt_state():
    rng = np.random.default_rng(6)
    a = make_pilots(rng, 4, 6)
    state = init_state(a, 1.0)
    state = update_b(state, 1, 2.0)
    with pytest.raises(ValueError):
        update_b(state, 1, 1.0)
    # corrupt B so that a^H b < 0 makes the denominator non-positive
    bad = init_state(a, 1.0)
    bad.b[:, 2] = -10.0 * a[:, 2]
    with pytest.raises(RuntimeError):
        update_b(bad, 2, 1.0)


# ---------------------------------------------------------------------------
# clmp_detect


def test_detect_noise_only_stops_immediately():
    rng = np.random.default_rng(7)
    a = make_pilots(rng, 8, 24, kind="bernoulli")
    res = clmp_detect(1.0 * np.eye(8), a, 1.0, MaxSelections(5))
    assert res.support == []
    assert res.iterations == 0
    assert np.all(res.gamma == 0.0)


def test_detect_single_atom():
    rng = np.random.default_rng(8)
    a = make_pilots(rng, 16, 64, kind="bernoulli")
    s_hat = np.eye(16) + 3.0 * np.outer(a[:, 7], a[:, 7].conj())
    res = clmp_detect(s_hat, a, 1.0, MaxSelections(1))
    assert res.support == [7]
    assert res.gamma[7] == pytest.approx(3.0, abs=1e-10)
    assert res.selections[0].epsilon < 0.0


def test_detect_input_validation():
    rng = np.random.default_rng(9)
    a = make_pilots(rng, 8, 16)
    with pytest.raises(ValueError):
        clmp_detect(np.eye(8), a, 0.0, MaxSelections(1))
    with pytest.raises(ValueError):
        clmp_detect(np.eye(7), a, 1.0, MaxSelections(1))
    with pytest.raises(ValueError):
        clmp_detect(np.ones((8, 7)), a, 1.0, MaxSelections(1))
    with pytest.raises(TypeError):
        clmp_detect(np.eye(8), a, 1.0, stop="five")
    with pytest.raises(ValueError):
        MaxSelections(0)
    with pytest.raises(ValueError):
        PowerThreshold(-1.0, 3)


def test_detect_returns_k_distinct_atoms_in_selection_order():
    rng = np.random.default_rng(10)
    a = make_pilots(rng, 32, 100, kind="bernoulli")
    s_hat, idx, _ = simulated_scm(rng, a, 64, 1.0, 6)
    res = clmp_detect(s_hat, a, 1.0, MaxSelections(6))
    assert len(res.support) == 6
    assert len(set(res.support)) == 6
    assert [s.index for s in res.selections] == res.support
    # selection order is by decreasing objective improvement, so epsilons rise
    eps_seq = [s.epsilon for s in res.selections]
    assert all(e < 0 for e in eps_seq)


def test_power_threshold_stops_before_weak_atoms():
    rng = np.random.default_rng(11)
    a = make_pilots(rng, 32, 8)
    s_hat = np.eye(32) + 5.0 * np.outer(a[:, 2], a[:, 2].conj()) + 0.3 * np.outer(a[:, 5], a[:, 5].conj())
    res = clmp_detect(s_hat, a, 1.0, PowerThreshold(tau=1.0, k_cap=8))
    assert res.support == [2]  # the 0.3-power atom is sub-threshold and not added
    res_cap = clmp_detect(s_hat, a, 1.0, PowerThreshold(tau=0.0, k_cap=1))
    assert res_cap.support == [2]


def test_sweep_matches_scalar_ops_column_by_column():
    from clmp.detector import _sweep

    rng = np.random.default_rng(12)
    a = make_pilots(rng, 10, 30)
    sigma2 = 0.9
    s_hat, _, _ = simulated_scm(rng, a, 20, sigma2, 4)
    # advance two iterations so B is non-trivial
    res = clmp_detect(s_hat, a, sigma2, MaxSelections(2))
    b = direct_b(a, res.gamma, sigma2)
    gamma_vec, eps_vec, ab_vec = _sweep(s_hat, a, b)
    for i in range(30):
        g_i = gamma_candidate(s_hat, a[:, i], b[:, i])
        assert gamma_vec[i] == pytest.approx(g_i, rel=1e-12, abs=1e-15)
        assert eps_vec[i] == pytest.approx(epsilon(g_i, ab_vec[i]), rel=1e-12, abs=1e-15)


def test_incremental_b_tracks_direct_solve():
    rng = np.random.default_rng(13)
    a = make_pilots(rng, 16, 48)
    sigma2 = 1.1
    s_hat, _, _ = simulated_scm(rng, a, 32, sigma2, 5)
    res = clmp_detect(s_hat, a, sigma2, MaxSelections(5))
    # replay selections, checking B after each against the dense solve
    from clmp.detector import DetectorState

    state = init_state(a, sigma2)
    gamma = np.zeros(48)
    for sel in res.selections:
        state = update_b(state, sel.index, sel.gamma)
        gamma[sel.index] = sel.gamma
        ref = direct_b(a, gamma, sigma2)
        rel = np.max(np.abs(state.b - ref)) / np.max(np.abs(ref))
        assert rel < 1e-8


def test_objective_descends_by_selected_epsilon():
    rng = np.random.default_rng(14)
    a = make_pilots(rng, 12, 36)
    sigma2 = 1.0
    s_hat, _, _ = simulated_scm(rng, a, 24, sigma2, 4)
    res = clmp_detect(s_hat, a, sigma2, MaxSelections(4))
    gamma = np.zeros(36)
    prev = negative_llf(gamma, a, sigma2, s_hat).value
    for sel in res.selections:
        gamma[sel.index] = sel.gamma
        cur = negative_llf(gamma, a, sigma2, s_hat).value
        assert cur <= prev + 1e-9
        assert (cur - prev) == pytest.approx(sel.epsilon, abs=1e-8)
        prev = cur


@given(c=st.floats(0.3, 5.0), seed=st.integers(0, 200))
@settings(max_examples=25, deadline=None)
def test_support_invariant_under_joint_scaling(c, seed):
    rng = np.random.default_rng(seed)
    a = make_pilots(rng, 10, 30)
    sigma2 = 1.0
    s_hat, _, _ = simulated_scm(rng, a, 20, sigma2, 3)
    res1 = clmp_detect(s_hat, a, sigma2, MaxSelections(3))
    res2 = clmp_detect(c * c * s_hat, a, c * c * sigma2, MaxSelections(3))
    assert res1.support == res2.support
    np.testing.assert_allclose(res2.gamma, c * c * res1.gamma, rtol=1e-8, atol=1e-12)


def test_support_equivariant_under_column_permutation():
    rng = np.random.default_rng(15)
    a = make_pilots(rng, 10, 30)
    s_hat, _, _ = simulated_scm(rng, a, 20, 1.0, 3)
    res = clmp_detect(s_hat, a, 1.0, MaxSelections(3))
    perm = rng.permutation(30)
    res_p = clmp_detect(s_hat, a[:, perm], 1.0, MaxSelections(3))
    # column j of the permuted matrix is column perm[j] of the original
    inv = np.empty(30, dtype=int)
    inv[perm] = np.arange(30)
    assert [int(inv[i]) for i in res.support] == res_p.support


def test_kernel_matches_numpy_reference():
    rng = np.random.default_rng(42)
    for trial in range(12):
        l = int(rng.integers(4, 17))
        n = int(rng.integers(l, 2 * l + 8))
        a = make_pilots(rng, l, n)
        sigma2 = float(rng.uniform(0.5, 2.0))
        s_hat, _, _ = simulated_scm(rng, a, 2 * l, sigma2, min(3, n // 2))
        stop: MaxSelections | PowerThreshold
        if trial % 3 == 2:
            stop = PowerThreshold(tau=float(rng.uniform(0.0, 0.3)), k_cap=n)
        else:
            stop = MaxSelections(k_max=int(rng.integers(1, min(l, n) + 1)))
        fast = clmp_detect(s_hat, a, sigma2, stop)
        ref = clmp_detect_reference(s_hat, a, sigma2, stop)
        assert fast.support == ref.support
        np.testing.assert_allclose(fast.gamma, ref.gamma, rtol=1e-10, atol=1e-14)
        for sf, sr in zip(fast.selections, ref.selections):
            assert sf.index == sr.index
            assert sf.gamma == pytest.approx(sr.gamma, rel=1e-10)
            assert sf.epsilon == pytest.approx(sr.epsilon, rel=1e-8, abs=1e-14)
