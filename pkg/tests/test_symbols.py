import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from fracsub.errors import DomainError, GridTooNarrowError, SingularityError, ZeroModeError
from fracsub.grid import Grid, SpectralField
from fracsub.stable import StableParams, realspace_riesz, stable_density_fft
from fracsub.symbols import (Symbol, apply_symbol, exp_operator_symbol, feller_integral_symbol,
                             log_operator_symbol, weyl_integral_symbol)

GRID = Grid(-40.0, 40.0, 4096)


def gauss(t, x):
    return np.exp(-x ** 2 / (4 * t)) / np.sqrt(4 * np.pi * t)


def test_exp_operator_examples():
    assert exp_operator_symbol(0.0, StableParams(1.3, 0.2), 1.7) == 1
    assert exp_operator_symbol(1.0, StableParams(2.0), 1.0) == pytest.approx(math.exp(-1), rel=1e-15)
    xi = np.linspace(-3, 3, 7)
    assert np.allclose(exp_operator_symbol(1.0, StableParams(1.0, -1.0), xi), np.exp(1j * xi), atol=1e-15)


def test_exp_operator_translation():
    g = Grid(-20.0, 20.0, 1024)
    f = np.exp(-(g.x + 1) ** 2)
    out = apply_symbol(f, Symbol.exp_operator(1.0, StableParams(1.0, -1.0)), g)
    assert np.max(np.abs(out - np.exp(-g.x ** 2))) < 1e-12


def test_log_operator_examples():
    assert log_operator_symbol(1.0, 1.5, 0.0) == 0.0
    assert log_operator_symbol(1.0, 2.0, 1.0) == pytest.approx(-math.log(2), rel=1e-15)
    assert log_operator_symbol(0.5, 1.0, 2.0) == pytest.approx(-math.log(2), rel=1e-15)
    with pytest.raises(DomainError):
        log_operator_symbol(0.0, 1.0, 1.0)


def test_feller_integral_examples():
    assert feller_integral_symbol(0.5, 0.0, 4.0) == pytest.approx(0.5, rel=1e-15)
    assert feller_integral_symbol(0.5, 0.5, 1.0) == pytest.approx(np.exp(-1j * np.pi / 4), rel=1e-15)
    assert feller_integral_symbol(0.3, 0.1, -1.0) == pytest.approx(np.conj(feller_integral_symbol(0.3, 0.1, 1.0)))
    with pytest.raises(SingularityError):
        feller_integral_symbol(0.5, 0.0, 0.0)
    with pytest.raises(DomainError):
        feller_integral_symbol(0.5, 0.7, 1.0)


def test_weyl_integral_examples():
    assert weyl_integral_symbol(2.0) == 0.5j
    assert weyl_integral_symbol(-2.0) == -0.5j
    with pytest.raises(SingularityError):
        weyl_integral_symbol(0.0)


def test_weyl_integral_of_odd_bump():
    g = Grid(-20.0, 20.0, 2048)
    f = g.x * np.exp(-g.x ** 2)
    out = apply_symbol(f, Symbol.weyl_integral(), g)
    ref = integrate.cumulative_simpson(f, x=g.x, initial=0.0)
    assert np.max(np.abs(out - ref)) < 1e-6
    assert np.max(np.abs(out + 0.5 * np.exp(-g.x ** 2))) < 1e-12


def test_zero_mode_policy():
    g = Grid(-20.0, 20.0, 256)
    f = np.exp(-g.x ** 2)
    with pytest.raises(ZeroModeError):
        apply_symbol(f, Symbol.weyl_integral(), g)
    apply_symbol(f, Symbol.weyl_integral(), g, zero_mode="drop")


def test_edge_decay_enforced():
    g = Grid(-5.0, 5.0, 256)
    with pytest.raises(GridTooNarrowError):
        apply_symbol(np.exp(-g.x ** 2 / 20), Symbol.identity(), g)


def test_identity():
    g = Grid(-20.0, 20.0, 256)
    f = np.exp(-g.x ** 2) * np.cos(g.x)
    assert np.allclose(apply_symbol(f, Symbol.identity(), g), f, atol=1e-15)


def test_laplacian_of_sine_on_periodic_grid():
    g = Grid(-math.pi, math.pi, 64)
    field = SpectralField.from_values(g, np.sin(g.x))
    out = apply_symbol(field, Symbol.riesz_feller(StableParams(2.0))).to_values()
    assert np.max(np.abs(out - (-np.sin(g.x)))) <= 1e-8


def test_riesz_matches_realspace_quadrature():
    g = Grid(-20.0, 20.0, 1024)
    f = np.exp(-g.x ** 2)
    out = apply_symbol(f, Symbol.riesz_feller(StableParams(1.5)), g, pad=128)
    for x0 in (0.0, 1.25):
        i = g.index_of(x0)
        assert out[i] == pytest.approx(realspace_riesz(lambda y: math.exp(-y * y), 1.5, x0), abs=1e-5)


def test_composition_is_symbol_product():
    g = Grid(-20.0, 20.0, 1024)
    f = np.exp(-g.x ** 2)
    p = StableParams(1.5, 0.5)
    field = SpectralField.from_values(g, f)
    two = apply_symbol(apply_symbol(field, Symbol.exp_operator(0.3, p)), Symbol.exp_operator(0.4, p))
    one = apply_symbol(field, Symbol.exp_operator(0.7, p))
    assert np.max(np.abs(two.to_values() - one.to_values())) < 1e-10
    prod = Symbol.exp_operator(0.3, p) * Symbol.exp_operator(0.4, p)
    assert np.allclose(prod(g.xi), Symbol.exp_operator(0.7, p)(g.xi), atol=1e-14)


@pytest.mark.parametrize("alpha", [2.0, 1.0])
def test_exp_operator_shifts_time(alpha):
    p = StableParams(alpha)
    # tabulate on a wider period so the heavy tails are represented
    big = GRID.padded(64)
    u1 = stable_density_fft(p, 1.0, big).values
    out = apply_symbol(SpectralField.from_values(big, u1), Symbol.exp_operator(0.5, p)).to_values()
    assert np.max(np.abs(out[GRID.window(64)] - stable_density_fft(p, 1.5, GRID).values)) <= 1e-6


def test_log_operator_series_in_time():
    # for u = exp(-xi^2 t), -log(1 + c xi^2) u = sum_n c^n/n d^n u/dt^n
    c, t = 0.1, 1.0
    g = Grid(-40.0, 40.0, 1024)
    out = apply_symbol(gauss(t, g.x), Symbol.log_operator(c, 2.0), g)
    mp.mp.dps = 40
    for x0 in (0.0, 0.78125, 2.5):
        term = lambda s: mp.exp(-mp.mpf(x0) ** 2 / (4 * s)) / mp.sqrt(4 * mp.pi * s)
        series = sum(mp.mpf(c) ** n / n * mp.diff(term, mp.mpf(t), n) for n in range(1, 13))
        assert out[g.index_of(x0)] == pytest.approx(float(series), abs=1e-4)
    mp.mp.dps = 15


@st.composite
def any_symbol(draw):
    alpha = draw(st.floats(0.2, 2.0))
    bound = min(alpha, 2 - alpha)
    theta = draw(st.floats(-bound, bound))
    c = draw(st.floats(0.0, 3.0))
    nu = draw(st.floats(0.1, 0.9))
    gam = draw(st.floats(-nu, nu))
    return draw(st.sampled_from([Symbol.riesz_feller(StableParams(alpha, theta)),
                                 Symbol.exp_operator(c, StableParams(alpha, theta)),
                                 Symbol.log_operator(c + 0.1, alpha), Symbol.feller_integral(nu, gam),
                                 Symbol.weyl_integral()]))


@given(any_symbol(), st.floats(0.01, 30.0))
def test_symbols_conjugate_symmetric(sym, xi):
    a, b = sym(np.array([xi, -xi]))
    assert b == pytest.approx(np.conj(a), rel=1e-12, abs=1e-300)


@given(st.floats(0.0, 5.0), st.floats(0.2, 2.0), st.floats(-50, 50))
def test_exp_symbol_contracts(c, alpha, xi):
    assert abs(exp_operator_symbol(c, StableParams(alpha, min(alpha, 2 - alpha)), xi)) <= 1 + 1e-15


def test_real_input_gives_real_output():
    g = Grid(-20.0, 20.0, 512)
    out = apply_symbol(np.exp(-g.x ** 2), Symbol.riesz_feller(StableParams(1.3, 0.4)), g)
    assert np.isrealobj(out)
