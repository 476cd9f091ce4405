"""Gamma-function helpers and the generalized Wright function 1Psi1."""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special

from .errors import DomainError, NonConvergenceError

MAX_TERMS = 10_000


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return float(special.gammaln(x))


def recip_gamma(x: float) -> float:
    """1/Gamma(x), exactly zero at the poles 0, -1, -2, ..."""
    if x <= 0 and x == math.floor(x):
        return 0.0
    return float(special.rgamma(x))


def _is_pole(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _log_abs_gamma(x: float) -> tuple[float, float]:
    """(log|Gamma(x)|, sign Gamma(x)) for non-pole x, via reflection when x <= 0."""
    if x > 0:
        return math.lgamma(x), 1.0
    # Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
    s = math.sin(math.pi * x)
    return math.log(math.pi) - math.log(abs(s)) - math.lgamma(1.0 - x), math.copysign(1.0, s)


def gamma_ratio(x: float, y: float) -> float:
    """Gamma(x)/Gamma(y), with poles resolved through the reflection formula.

    When both arguments sit on poles the pole factors cancel analytically:
    the ratio is the limit along ``x + eps, y + eps``, which equals
    ``(-1)**(y - x) * Gamma(1 - y) / Gamma(1 - x)``.
    """
    px, py = _is_pole(x), _is_pole(y)
    if py and not px:
        return 0.0
    if px and not py:
        return math.inf
    if px and py:
        sign = -1.0 if int(y - x) % 2 else 1.0
        return sign * math.exp(math.lgamma(1.0 - y) - math.lgamma(1.0 - x))
    lx, sx = _log_abs_gamma(x)
    ly, sy = _log_abs_gamma(y)
    return sx * sy * math.exp(lx - ly)


@dataclass(frozen=True)
class WrightParams:
    """Parameter pairs ``(a1, A1)`` over ``(b1, B1)`` of 1Psi1."""

    a1: float
    A1: float
    b1: float
    B1: float

    def __post_init__(self):
        for name in ("A1", "B1"):
            v = getattr(self, name)
            if not math.isfinite(v) or v == 0:
                raise DomainError(f"{name} must be finite and nonzero")


def wright_1psi1(params: WrightParams, z: float, rtol: float = 1e-16) -> float:
    """Sum_j Gamma(a1 + A1 j) / Gamma(b1 + B1 j) * z**j / j!.

    Summation stops once three consecutive terms are below ``rtol`` times the
    running sum.  The Gamma ratio goes through :func:`gamma_ratio`, so terms
    whose numerator and denominator both hit poles contribute their limit.
    """
    if z == 0:
        return gamma_ratio(params.a1, params.b1)
    total = 0.0
    small = 0
    log_abs_z = math.log(abs(z))
    z_sign = math.copysign(1.0, z)
    for j in range(MAX_TERMS):
        ratio = gamma_ratio(params.a1 + params.A1 * j, params.b1 + params.B1 * j)
        if math.isinf(ratio):
            raise NonConvergenceError(f"pole in the numerator at term {j}")
        if ratio == 0.0:
            term = 0.0
        else:
            log_term = math.log(abs(ratio)) + j * log_abs_z - math.lgamma(j + 1.0)
            if log_term > 700.0:
                raise NonConvergenceError(f"1Psi1 terms overflow at j={j} (z={z})")
            sign = math.copysign(1.0, ratio) * (z_sign ** j)
            term = sign * math.exp(log_term) if log_term > -745.0 else 0.0
        total += term
        if abs(term) < rtol * abs(total) or (term == 0.0 and total == 0.0 and j > 0):
            small += 1
            if small == 3:
                return total
        else:
            small = 0
    raise NonConvergenceError(f"1Psi1 did not converge in {MAX_TERMS} terms (z={z})")
