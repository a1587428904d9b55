import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize

from riciancap.channel import ChannelSpec, baseline_spec, effective_channel, normalize_spec
from riciancap.errors import NotUncorrelated
from riciancap.replica import asymptotic_stats, solve_fixed_point
from riciancap.waterfill import los_eigenmodes, optimize_uncorrelated, uncorrelated_mean, waterfill_powers


def general_mean(spec, q):
    eff = effective_channel(spec, q)
    return asymptotic_stats(eff, solve_fixed_point(eff)).mean_nats


def uniform_mean(spec, power=None):
    p = spec.rho if power is None else power
    return general_mean(spec, p / spec.n_t * np.eye(spec.n_t))


def rician_uncorrelated(rng, n_r, n_t, k_db, snr_db):
    h = rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t))
    return normalize_spec(ChannelSpec(h, np.eye(n_t), np.eye(n_r), snr_db, k_db))


def kkt_violation(sol):
    floors = (1 + sol.w) / (sol.z * (1 + sol.w) + sol.eigvals)
    on = sol.q_bar_diag > 0
    viol = np.abs(sol.xi - floors[on] - sol.q_bar_diag[on]).max(initial=0.0)
    return max(viol, np.max(sol.xi - floors[~on] - 1e-10, initial=0.0))


def test_los_eigenmodes():
    lam, u = los_eigenmodes(np.zeros((2, 3)))
    np.testing.assert_array_equal(lam, np.zeros(3))
    np.testing.assert_array_equal(u, np.eye(3))
    lam, u = los_eigenmodes(np.ones((4, 4)))
    np.testing.assert_allclose(lam, [16, 0, 0, 0], atol=1e-12)
    lam, _ = los_eigenmodes(np.diag([2.0, 1.0]))
    np.testing.assert_allclose(lam, [4.0, 1.0])
    h = np.random.default_rng(0).standard_normal((3, 5))
    lam, u = los_eigenmodes(h)
    np.testing.assert_allclose((u * lam) @ u.conj().T, h.T @ h, atol=1e-12)


def test_waterfill_equal_levels():
    q, xi = waterfill_powers(np.zeros(4), 0.0, 4.0)
    np.testing.assert_array_equal(q, np.ones(4))
    assert xi == 2.0


def test_waterfill_single_mode():
    q, xi = waterfill_powers([16.0, 0.0, 0.0, 0.0], 0.0, 0.1)
    np.testing.assert_allclose(q, [0.1, 0, 0, 0], atol=1e-15)
    assert xi == pytest.approx(1 / 17 + 0.1)


def test_waterfill_two_mode_closed_form():
    # floors 2/5 and 2/3, both active: xi = (2 + 2/5 + 2/3) / 2 = 23/15
    q, xi = waterfill_powers([3.0, 1.0], 1.0, 2.0)
    assert xi == pytest.approx(23 / 15, rel=1e-14)
    np.testing.assert_allclose(q, [17 / 15, 13 / 15], rtol=1e-14)
    assert q.sum() == pytest.approx(2.0)


@settings(max_examples=60, deadline=None)
@given(
    lam=st.lists(st.floats(0.0, 200.0), min_size=1, max_size=12),
    w=st.floats(0.0, 20.0), z=st.floats(0.01, 10.0), rho=st.floats(0.01, 100.0),
    c=st.floats(0.1, 10.0), seed=st.integers(0, 1000),
)
def test_waterfill_properties(lam, w, z, rho, c, seed):
    lam = np.array(lam)
    q, xi = waterfill_powers(lam, w, rho, z)
    assert q.sum() == pytest.approx(rho, rel=1e-10)
    floors = (1 + w) / (z * (1 + w) + lam)
    on = q > 0
    np.testing.assert_allclose(q[on], xi - floors[on], atol=1e-10 * (1 + rho))
    assert np.all(xi <= floors[~on] + 1e-10)
    # levels depend on ratios only: lam -> c lam, (1+w) -> c (1+w)
    q2, _ = waterfill_powers(c * lam, c * (1 + w) - 1, rho, z)
    np.testing.assert_allclose(q2, q, atol=1e-9 * (1 + rho))
    perm = np.random.default_rng(seed).permutation(lam.size)
    q3, _ = waterfill_powers(lam[perm], w, rho, z)
    np.testing.assert_allclose(q3, q[perm], atol=1e-12 * (1 + rho))


def test_uncorrelated_mean_matches_general_formula(rng):
    spec = rician_uncorrelated(rng, 3, 4, 5.0, 10.0)
    lam, u = los_eigenmodes(spec.h_bar)
    q = np.array([2.0, 1.0, 0.5, 0.0])
    cov = (u * q) @ u.conj().T
    eff = effective_channel(spec, cov)
    fp = solve_fixed_point(eff)
    ref = asymptotic_stats(eff, fp).mean_nats
    assert uncorrelated_mean(lam, q, fp.w, fp.z, 3) == pytest.approx(ref, rel=1e-10)


def test_rayleigh_returns_uniform():
    spec = baseline_spec(4, 4, -math.inf, 0.0, 10.0)
    sol = optimize_uncorrelated(spec)
    np.testing.assert_array_equal(sol.q_bar_diag, np.full(4, spec.rho / 4))


def test_siso_no_allocation_freedom():
    spec = baseline_spec(1, 1, -math.inf, 0.0, 10 * math.log10(3.0))
    sol = optimize_uncorrelated(spec)
    w = (-1 + math.sqrt(13)) / 2
    assert sol.capacity_nats == pytest.approx(2 * math.log1p(w) - w / (1 + w), abs=1e-9)
    assert sol.capacity_nats == pytest.approx(1.1024889346, abs=1e-9)


def test_rank_one_los_beats_uniform():
    spec = baseline_spec(4, 4, 10.0, 0.0, 10.0)
    sol = optimize_uncorrelated(spec)
    assert sol.capacity_nats > uniform_mean(spec) + 1e-3
    assert kkt_violation(sol) <= 1e-8
    assert sol.q_bar_diag.sum() == pytest.approx(spec.rho, abs=1e-8)
    # capacity reported in the eigen domain equals the general formula at Q
    assert general_mean(spec, sol.covariance) == pytest.approx(sol.capacity_nats, abs=1e-9)


def test_matches_direct_numerical_optimization(rng):
    # independent route: maximize the general asymptotic mean over eigen-domain powers
    spec = rician_uncorrelated(rng, 3, 3, 3.0, 3.0)
    lam, u = los_eigenmodes(spec.h_bar)
    sol = optimize_uncorrelated(spec)

    def neg(x):
        q = np.abs(x) * spec.rho / np.abs(x).sum()
        return -general_mean(spec, (u * q) @ u.conj().T)

    best = minimize(neg, np.ones(3), method="Nelder-Mead", options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 4000})
    assert sol.capacity_nats >= -best.fun - 1e-9
    assert sol.capacity_nats == pytest.approx(-best.fun, abs=1e-6)


def test_beats_random_allocations(rng):
    spec = rician_uncorrelated(rng, 4, 3, 10.0, 0.0)
    sol = optimize_uncorrelated(spec)
    lam, u = los_eigenmodes(spec.h_bar)
    for _ in range(30):
        q = rng.dirichlet(np.ones(3)) * spec.rho
        assert general_mean(spec, (u * q) @ u.conj().T) <= sol.capacity_nats + 1e-9


def test_power_budget_override():
    spec = baseline_spec(2, 3, 10.0, 0.0, 10.0)
    sol = optimize_uncorrelated(spec, power=0.5)
    assert sol.q_bar_diag.sum() == pytest.approx(0.5)


def test_rejects_correlated():
    with pytest.raises(NotUncorrelated):
        optimize_uncorrelated(baseline_spec(4, 4, 10.0, 0.5, 10.0))


def test_oscillating_outer_iteration_converges():
    # 3x8 Rician draw at 20 dB where the undamped update flips sign with gain > 1
    rng = np.random.default_rng(77)
    for _ in range(26):
        n_r, n_t = (int(x) for x in rng.integers(1, 9, size=2))
        h = rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t))
        k_db, snr = float(rng.choice([0.0, 5.0, 10.0])), float(rng.choice([-5.0, 0.0, 10.0, 20.0]))
    assert (n_r, n_t, k_db, snr) == (3, 8, 0.0, 20.0)
    spec = normalize_spec(ChannelSpec(h, np.eye(n_t), np.eye(n_r), snr, k_db))
    sol = optimize_uncorrelated(spec)
    assert kkt_violation(sol) <= 1e-8
    assert general_mean(spec, sol.covariance) == pytest.approx(sol.capacity_nats, abs=1e-9)
