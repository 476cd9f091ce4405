"""Fourier symbols of the fractional operators and their spectral application.

An operator ``A`` with symbol ``a(xi)`` acts by ``F{A f}(xi) = a(xi) F{f}(xi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import DomainError, SingularityError, ZeroModeError
from .grid import Grid, SpectralField, check_edge_decay
from .stable import StableParams, rf_symbol

ZERO_MODE_TOL = 1e-10


@dataclass(frozen=True)
class Symbol:
    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str
    singular_at_zero: bool = False

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.singular_at_zero:
            out = np.zeros(xi.shape, dtype=complex)
            nz = xi != 0
            out[nz] = self.evaluator(xi[nz])
            return out
        return np.asarray(self.evaluator(xi), dtype=complex)

    def __mul__(self, other: "Symbol") -> "Symbol":
        return Symbol(lambda xi: self.evaluator(xi) * other.evaluator(xi),
                      f"({self.label})*({other.label})",
                      self.singular_at_zero or other.singular_at_zero)

    # Named constructors ----------------------------------------------------

    @classmethod
    def identity(cls) -> "Symbol":
        return cls(lambda xi: np.ones_like(xi, dtype=complex), "I")

    @classmethod
    def riesz_feller(cls, p: StableParams) -> "Symbol":
        return cls(lambda xi: -rf_symbol(p, xi), f"D^({p.alpha},{p.theta})")

    @classmethod
    def exp_operator(cls, c: float, p: StableParams) -> "Symbol":
        return cls(lambda xi: exp_operator_symbol(c, p, xi), f"O_{c}^({p.alpha},{p.theta})")

    @classmethod
    def log_operator(cls, c: float, alpha: float) -> "Symbol":
        return cls(lambda xi: log_operator_symbol(c, alpha, xi).astype(complex), f"P_{c}^{alpha}")

    @classmethod
    def feller_integral(cls, nu: float, gamma_idx: float) -> "Symbol":
        _check_feller(nu, gamma_idx)
        return cls(lambda xi: np.abs(xi) ** (-nu) * np.exp(-1j * np.pi * gamma_idx * np.sign(xi) / 2),
                   f"I_{gamma_idx}^{nu}", singular_at_zero=True)

    @classmethod
    def weyl_integral(cls) -> "Symbol":
        return cls(lambda xi: 1j * np.sign(xi) / np.abs(xi), "I_+^1", singular_at_zero=True)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], label: str,
                      singular_at_zero: bool = False) -> "Symbol":
        return cls(fn, label, singular_at_zero)


def exp_operator_symbol(c: float, p: StableParams, xi):
    """exp(-c psi(xi)): the fractional shift operator ``O_c``."""
    out = np.exp(-c * np.asarray(rf_symbol(p, xi)))
    return complex(out) if np.ndim(out) == 0 else out


def log_operator_symbol(c: float, alpha: float, xi):
    """-ln(1 + c |xi|**alpha), used on the whole frequency line."""
    if not c > 0:
        raise DomainError("log operator needs c > 0")
    out = -np.log1p(c * np.abs(np.asarray(xi, dtype=float)) ** alpha)
    return float(out) if np.ndim(out) == 0 else out


def _check_feller(nu: float, gamma_idx: float):
    if not (0 < nu < 1 and abs(gamma_idx) <= nu) and not (1 < nu < 2 and abs(gamma_idx) <= 2 - nu):
        raise DomainError(f"Feller integral parameters out of range: nu={nu}, gamma={gamma_idx}")


def feller_integral_symbol(nu: float, gamma_idx: float, xi):
    """|xi|**(-nu) exp(-i pi gamma sign(xi)/2); singular at xi = 0."""
    _check_feller(nu, gamma_idx)
    xi = np.asarray(xi, dtype=float)
    if np.any(xi == 0):
        raise SingularityError("Feller integral symbol is singular at xi = 0")
    out = np.abs(xi) ** (-nu) * np.exp(-1j * np.pi * gamma_idx * np.sign(xi) / 2)
    return complex(out) if np.ndim(out) == 0 else out


def weyl_integral_symbol(xi):
    """i sign(xi)/|xi|, the symbol of ``f -> int_{-inf}^x f``; singular at 0."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi == 0):
        raise SingularityError("Weyl integral symbol is singular at xi = 0")
    out = 1j * np.sign(xi) / np.abs(xi)
    return complex(out) if np.ndim(out) == 0 else out


def _multiply(coefficients: np.ndarray, xi: np.ndarray, sym: Symbol, zero_mode: str) -> np.ndarray:
    if sym.singular_at_zero:
        zero = xi == 0
        c0 = np.abs(coefficients[zero])
        if zero_mode == "require" and np.any(c0 > ZERO_MODE_TOL):
            raise ZeroModeError(f"zero-frequency coefficient {c0.max():.3g} must vanish "
                                f"before applying {sym.label}")
        if zero_mode not in ("require", "drop"):
            raise DomainError(f"unknown zero-mode policy {zero_mode!r}")
    return coefficients * sym(xi)


def apply_symbol(field: Union[SpectralField, np.ndarray], sym: Symbol, grid: Optional[Grid] = None,
                 zero_mode: str = "require", pad: int = 1):
    """Apply ``sym`` to a spectral field, or to values tabulated on ``grid``.

    Tabulated input must decay below 1e-12 at the grid edges; it is
    zero-padded by ``pad`` before the transform to push periodic images away,
    and the result is cropped back.  For singular symbols the zero mode must
    vanish (``zero_mode="require"``) or is discarded (``"drop"``), and the
    output constant, which the periodic grid cannot see, is fixed so that the
    result vanishes at the left end of the padded domain.
    Real, conjugate-symmetric round trips return real arrays.
    """
    if isinstance(field, SpectralField):
        return SpectralField(field.grid, _multiply(field.coefficients, field.grid.xi, sym, zero_mode))
    if grid is None:
        raise DomainError("tabulated input needs its grid")
    values = np.asarray(field)
    check_edge_decay(grid, values)
    big = grid.padded(pad)
    padded = np.zeros(big.n, dtype=values.dtype)
    padded[grid.window(pad)] = values
    full = big.inverse(_multiply(big.forward(padded), big.xi, sym, zero_mode))
    if sym.singular_at_zero:
        # the zero mode of the output is lost; anchor it to vanish at the far left
        full = full - full[0]
    out = full[grid.window(pad)]
    if np.isrealobj(values):
        scale = max(1.0, float(np.max(np.abs(out))))
        if np.max(np.abs(out.imag)) <= 1e-10 * scale:
            return out.real
    return out
