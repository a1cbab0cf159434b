import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onoff_mud.power import (
    PowerProfile,
    constant_profile,
    exponential_profile,
    gamma_const,
    gamma_opt,
    gamma_robust,
    min_sinr,
    robust_profile,
    technical_condition,
)


def leakage_residual(p, lam, theta, g):
    """Naive O(n^2) check of p_l = g (1 + theta*lam*sum_{j<l} + lam*sum_{j>l})."""
    n = len(p)
    worst = 0.0
    for ell in range(n):
        rhs = g * (1.0 + theta * lam * sum(p[:ell]) + lam * sum(p[ell + 1 :]))
        worst = max(worst, abs(p[ell] - rhs) / p[ell])
    return worst


def naive_min_sinr(p, lam):
    return min(p[ell] / (1.0 + lam * sum(p[ell + 1 :])) for ell in range(len(p)))


def naive_technical(p, lam):
    n = len(p)
    vals = []
    for i in range(n - 1):
        sigma2 = 1.0 + lam * sum(p[i + 1 :])
        vals.append(math.log(n) * sum(q * q for q in p[i + 1 :]) / sigma2**2)
    return vals


def test_constant_profile_values():
    prof = constant_profile(100, 0.1, 100.0)
    assert np.all(prof.powers == 10.0)
    assert constant_profile(1, 0.5, 2.0).powers.tolist() == [4.0]


def test_constant_profile_min_sinr():
    prof = constant_profile(100, 0.1, 100.0)
    expected = 100.0 / (0.1 * (100 + 99 * 100.0))
    assert min_sinr(prof) == pytest.approx(expected, rel=1e-12)
    assert gamma_const(100, 0.1, 100.0) == pytest.approx(expected, rel=1e-15)
    assert min_sinr(prof) == pytest.approx(naive_min_sinr(prof.powers.tolist(), 0.1), rel=1e-12)


@pytest.mark.parametrize("lam,snr", [(0.0, 1.0), (1.0, 1.0), (0.5, 0.0), (0.5, -1.0)])
def test_constructors_validate(lam, snr):
    with pytest.raises(ValueError):
        constant_profile(10, lam, snr)
    with pytest.raises(ValueError):
        exponential_profile(10, lam, snr)


def test_profile_rejects_inconsistent_snr():
    with pytest.raises(ValueError):
        PowerProfile(np.ones(4), 0.5, 3.0)
    with pytest.raises(ValueError):
        PowerProfile(np.array([1.0, -1.0]), 0.5, 0.0001)


def test_exponential_single_user():
    prof = exponential_profile(1, 0.1, 100.0)
    assert prof.powers[0] == pytest.approx(100.0 / 0.1, rel=1e-12)
    assert min_sinr(prof) == pytest.approx(prof.powers[0], rel=1e-12)


@pytest.mark.parametrize("n", [10, 100, 1000])
def test_exponential_fixed_point(n):
    lam, snr = 0.1, 100.0
    prof = exponential_profile(n, lam, snr)
    g = gamma_opt(n, lam, snr)
    assert lam * prof.powers.sum() == pytest.approx(snr, rel=1e-9)
    assert leakage_residual(prof.powers.tolist(), lam, 0.0, g) < 1e-9
    assert min_sinr(prof) == pytest.approx(g, rel=1e-9)


def test_exponential_matches_geometric_form():
    n, lam, snr = 50, 0.2, 30.0
    g = ((1 + snr) ** (1 / n) - 1) / lam
    expected = g * (1 + lam * g) ** (n - np.arange(1, n + 1))
    assert np.allclose(exponential_profile(n, lam, snr).powers, expected, rtol=1e-10)


@pytest.mark.parametrize("snr_db,ratio", [(10, 2.6), (20, 4.7)])
def test_sinr_gain_closed_form(snr_db, ratio):
    snr = 10 ** (snr_db / 10)
    assert (1 + snr) * math.log1p(snr) / snr == pytest.approx(ratio, abs=0.1)


def test_sinr_gain_tends_to_closed_form():
    snr = 100.0
    closed = (1 + snr) * math.log1p(snr) / snr
    gaps = []
    for n in (100, 1000, 10_000, 100_000):
        r = min_sinr(exponential_profile(n, 0.1, snr)) / min_sinr(constant_profile(n, 0.1, snr))
        gaps.append(abs(r / closed - 1))
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 2e-4


@pytest.mark.parametrize("n", [10, 100, 1000])
@pytest.mark.parametrize("theta", [0.0, 0.05, 0.1, 0.5, 0.9])
def test_robust_fixed_point(n, theta):
    lam, snr = 0.1, 100.0
    prof = robust_profile(n, lam, snr, theta)
    g = gamma_robust(n, lam, snr, theta)
    assert lam * prof.powers.sum() == pytest.approx(snr, rel=1e-9)
    assert leakage_residual(prof.powers.tolist(), lam, theta, g) < 1e-9


@pytest.mark.parametrize("n", [10, 100, 1000])
def test_robust_limits(n):
    lam, snr = 0.1, 100.0
    assert np.allclose(robust_profile(n, lam, snr, 0.0).powers, exponential_profile(n, lam, snr).powers, rtol=1e-9)
    assert np.allclose(robust_profile(n, lam, snr, 1.0).powers, constant_profile(n, lam, snr).powers, rtol=1e-9)
    assert gamma_robust(n, lam, snr, 1.0) == pytest.approx(gamma_const(n, lam, snr), rel=1e-12)
    # the closed form approaches the constant profile continuously
    near = robust_profile(n, lam, snr, 1 - 1e-7)
    assert np.allclose(near.powers, snr / (lam * n), rtol=1e-5)


def test_robust_spread_between_extremes():
    n, lam, snr = 100, 0.1, 100.0
    spread = lambda p: p.powers[0] / p.powers[-1]
    s_exp = spread(robust_profile(n, lam, snr, 0.0))
    s_mid = spread(robust_profile(n, lam, snr, 0.1))
    s_const = spread(robust_profile(n, lam, snr, 1.0))
    assert s_const == pytest.approx(1.0)
    assert s_const < s_mid < s_exp


def test_robust_rejects_bad_theta():
    with pytest.raises(ValueError):
        robust_profile(10, 0.1, 1.0, -0.1)
    with pytest.raises(ValueError):
        robust_profile(10, 0.1, 1.0, 1.5)


def test_gamma_theta_monotone():
    thetas = np.linspace(0, 1, 101)
    for n, lam, snr in [(100, 0.1, 100.0), (10, 0.5, 3.0), (1000, 0.05, 1e4)]:
        g = [gamma_robust(n, lam, snr, t) for t in thetas]
        assert all(a >= b for a, b in zip(g, g[1:]))


def test_exponential_maximizes_min_sinr():
    n, lam, snr = 100, 0.1, 100.0
    best = min_sinr(exponential_profile(n, lam, snr))
    assert best > min_sinr(constant_profile(n, lam, snr))
    for theta in (0.01, 0.1, 0.5, 0.99):
        assert best > min_sinr(robust_profile(n, lam, snr, theta))


def test_min_sinr_matches_naive():
    prof = robust_profile(40, 0.3, 15.0, 0.2)
    assert min_sinr(prof) == pytest.approx(naive_min_sinr(prof.powers.tolist(), 0.3), rel=1e-12)


def test_technical_condition_hand_value():
    prof = PowerProfile(np.array([1.0, 1.0]), 0.5, 1.0)
    assert technical_condition(prof) == pytest.approx(math.log(2) / 2.25, rel=1e-12)


def test_technical_condition_matches_naive():
    prof = robust_profile(30, 0.2, 10.0, 0.1)
    naive = naive_technical(prof.powers.tolist(), 0.2)
    assert technical_condition(prof) == pytest.approx(max(naive), rel=1e-12)


def test_technical_condition_vanishing_last_user():
    p = np.array([1.0, 1.0, 1e-12])
    lam = 1.0 / p.sum()
    terms = naive_technical(p.tolist(), lam)
    assert terms[-1] < 1e-20
    assert technical_condition(PowerProfile(p, lam, 1.0)) == pytest.approx(max(terms[:-1]), rel=1e-12)


def test_technical_condition_decreases_with_n():
    vals = [technical_condition(constant_profile(n, 0.1, 100.0)) for n in (100, 1000, 10_000)]
    assert vals[0] > vals[1] > vals[2]


def test_technical_condition_needs_two_users():
    with pytest.raises(ValueError):
        technical_condition(constant_profile(1, 0.5, 1.0))


def test_profile_csv():
    text = constant_profile(3, 0.5, 3.0).to_csv()
    assert text == "index,power\n1,2.0\n2,2.0\n3,2.0\n"


@settings(max_examples=150, deadline=None)
@given(
    n=st.integers(1, 3000),
    lam=st.floats(0.001, 0.999),
    snr_db=st.floats(-20, 40),
    theta=st.floats(0.0, 1.0),
)
def test_total_snr_invariant(n, lam, snr_db, theta):
    snr = 10 ** (snr_db / 10)
    for prof in (
        constant_profile(n, lam, snr),
        exponential_profile(n, lam, snr),
        robust_profile(n, lam, snr, theta),
    ):
        assert lam * prof.powers.sum() == pytest.approx(snr, rel=1e-9)
        assert np.all(prof.powers > 0)
