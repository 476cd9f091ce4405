import math

import mpmath as mp
import pytest
from hypothesis import given, strategies as st
from scipy import special

from fracsub.errors import DomainError, NonConvergenceError
from fracsub.special_fn import WrightParams, gamma_ratio, log_gamma, recip_gamma, wright_1psi1


@pytest.mark.parametrize("x, expected", [(1.0, 0.0), (0.5, 0.5723649429247001), (10.0, 12.801827480081469)])
def test_log_gamma_values(x, expected):
    assert log_gamma(x) == pytest.approx(expected, rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, -2.5])
def test_log_gamma_rejects_nonpositive(x):
    with pytest.raises(DomainError):
        log_gamma(x)


@pytest.mark.parametrize("x, expected", [(0.0, 0.0), (-3.0, 0.0), (2.0, 1.0)])
def test_recip_gamma_values(x, expected):
    assert recip_gamma(x) == expected


@pytest.mark.parametrize("x", [0.1, 0.5, 1.5, 3.7])
def test_recip_gamma_inverts_gamma(x):
    assert recip_gamma(x) * special.gamma(x) == pytest.approx(1.0, abs=1e-12)


@given(st.floats(-30, 30).filter(lambda v: abs(v - round(v)) > 1e-3),
       st.floats(-30, 30).filter(lambda v: abs(v - round(v)) > 1e-3))
def test_gamma_ratio_matches_mpmath(x, y):
    expected = float(mp.gamma(x) / mp.gamma(y))
    assert gamma_ratio(x, y) == pytest.approx(expected, rel=1e-11)


@pytest.mark.parametrize("x, y", [(-3.0, -1.0), (-2.0, -5.0), (0.0, -4.0), (-6.0, -6.0)])
def test_gamma_ratio_pole_pairs_are_the_shifted_limit(x, y):
    mp.mp.dps = 50
    eps = mp.mpf("1e-30")
    expected = float(mp.gamma(x + eps) / mp.gamma(y + eps))
    mp.mp.dps = 15
    assert gamma_ratio(x, y) == pytest.approx(expected, rel=1e-13)


def test_gamma_ratio_single_poles():
    assert gamma_ratio(1.5, -2.0) == 0.0
    assert gamma_ratio(-2.0, 1.5) == math.inf


def test_wright_params_validation():
    with pytest.raises(DomainError):
        WrightParams(1.0, 0.0, 1.0, -1.0)
    with pytest.raises(DomainError):
        WrightParams(1.0, -1.0, 1.0, math.inf)


def test_wright_at_zero_is_single_term():
    assert wright_1psi1(WrightParams(1.5, -1.0, 1.5, -1.0), 0.0) == 1.0
    assert wright_1psi1(WrightParams(2.5, -1.0, 1.25, -1.0), 0.0) == pytest.approx(
        special.gamma(2.5) / special.gamma(1.25), rel=1e-14)


def _mp_wright(a1, A1, b1, B1, z, terms=400, shift="1e-40"):
    mp.mp.dps = 60
    eps = mp.mpf(shift)
    total = mp.mpf(0)
    for j in range(terms):
        total += mp.gamma(a1 + A1 * j + eps) / mp.gamma(b1 + B1 * j + eps) * mp.mpf(z) ** j / mp.factorial(j)
    mp.mp.dps = 15
    return float(total)


def test_wright_equal_pairs_sum_to_e():
    # every ratio is 1 after the pole factors cancel, so the series is exp(z)
    value = wright_1psi1(WrightParams(2.0, -1.0, 2.0, -1.0), 1.0)
    assert value == pytest.approx(_mp_wright(2, -1, 2, -1, 1.0, terms=60), rel=1e-14)
    assert value == pytest.approx(math.e, rel=1e-15)


@pytest.mark.parametrize("a1, b1, z", [(1.5, 1.5, 1.0), (1.5, 1.5, 0.5), (0.75, 1.3, 2.0), (1.2, 0.6, -1.5)])
def test_wright_matches_brute_force(a1, b1, z):
    assert wright_1psi1(WrightParams(a1, -1.0, b1, -1.0), z) == pytest.approx(
        _mp_wright(a1, -1, b1, -1, z, terms=120), rel=1e-12)


def test_wright_positive_increments_match_brute_force():
    assert wright_1psi1(WrightParams(0.5, 1.0, 1.0, 2.0), 0.8) == pytest.approx(
        _mp_wright(0.5, 1, 1.0, 2, 0.8, terms=120), rel=1e-12)


@pytest.mark.parametrize("z", [0.3, 1.0, 4.0])
def test_wright_stopping_rule_is_stable(z):
    p = WrightParams(1.5, -1.0, 1.5, -1.0)
    a = wright_1psi1(p, z, rtol=1e-16)
    b = wright_1psi1(p, z, rtol=1e-17)
    assert abs(a - b) <= 1e-12 * abs(b)


def test_wright_nonconvergence_is_reported():
    with pytest.raises(NonConvergenceError):
        wright_1psi1(WrightParams(1.5, -1.0, 1.5, -1.0), 1e5)


def test_wright_numerator_pole_is_reported():
    with pytest.raises(NonConvergenceError):
        wright_1psi1(WrightParams(1.0, -1.0, 1.5, -1.0), 1.0)
