"""Random clocks: Poisson, gamma and linear-birth (Yule-Furry) processes with drift.

Each clock value at time ``t`` is ``a*t + C(t)`` where ``C`` is one of
``N(t) ~ Poisson(lambda t)``, ``Gamma(t) ~ Gamma(shape mu t, rate rho)`` or
``B(t) ~ Geometric(exp(-lambda t))`` on ``{1, 2, ...}``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .errors import DomainError, SingularityError


class ClockKind(str, enum.Enum):
    POISSON = "poisson"
    GAMMA = "gamma"
    BIRTH = "birth"


@dataclass(frozen=True)
class TimeChangeSpec:
    kind: ClockKind
    a: float = 0.0
    lam: float = 1.0
    mu: float = 0.0
    rho: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ClockKind(self.kind))
        if self.a < 0:
            raise DomainError("drift a must be nonnegative")
        if self.kind is ClockKind.GAMMA:
            if self.mu < 0 or not self.rho > 0:
                raise DomainError("gamma clock needs mu >= 0 and rho > 0")
        elif not self.lam > 0:
            raise DomainError("rate lambda must be positive")

    @classmethod
    def poisson(cls, a: float, lam: float) -> "TimeChangeSpec":
        return cls(ClockKind.POISSON, a=a, lam=lam)

    @classmethod
    def gamma(cls, a: float, mu: float, rho: float) -> "TimeChangeSpec":
        return cls(ClockKind.GAMMA, a=a, mu=mu, rho=rho)

    @classmethod
    def birth(cls, a: float, lam: float) -> "TimeChangeSpec":
        return cls(ClockKind.BIRTH, a=a, lam=lam)

    def mean(self, t: float) -> float:
        if self.kind is ClockKind.POISSON:
            return (self.a + self.lam) * t
        if self.kind is ClockKind.GAMMA:
            return (self.a + self.mu / self.rho) * t
        return self.a * t + math.exp(self.lam * t)


def gamma_density(mu: float, rho: float, t: float, x: float) -> float:
    """Density of Gamma(t) with shape ``mu t`` and rate ``rho``.

    At ``x = 0`` the limit is returned: 0 for ``mu t > 1``, ``rho`` for
    ``mu t = 1`` and ``inf`` for ``mu t < 1``.
    """
    shape = mu * t
    if not shape > 0 or not rho > 0:
        raise DomainError("gamma density needs mu t > 0 and rho > 0")
    if x < 0:
        return 0.0
    if x == 0:
        if shape > 1:
            return 0.0
        return rho if shape == 1 else math.inf
    return float(math.exp(shape * math.log(rho) - special.gammaln(shape)
                          + (shape - 1) * math.log(x) - rho * x))


def yule_pmf(lam: float, t: float, k):
    """P{B(t) = k} = exp(-lam t) (1 - exp(-lam t))**(k-1) for one progenitor."""
    k = np.asarray(k)
    if np.any(k < 1):
        raise DomainError("Yule pmf is supported on k >= 1")
    if t < 0 or not lam > 0:
        raise DomainError("Yule pmf needs lam > 0 and t >= 0")
    p = math.exp(-lam * t)
    q = -math.expm1(-lam * t)
    out = p * q ** (k - 1.0)
    return float(out) if out.ndim == 0 else out


def laplace_exponent(spec: TimeChangeSpec, s, t: float):
    """E exp(-s * clock(t)) for complex ``s`` with ``Re s >= 0``.

    This is the full transform at time ``t``.  For the birth clock it is not
    of the form ``exp(-t * phi(s))`` because the clock is not a Levy process.
    """
    s = np.asarray(s, dtype=complex)
    a = spec.a
    if spec.kind is ClockKind.POISSON:
        out = np.exp(-s * a * t - spec.lam * t * (-np.expm1(-s)))
    elif spec.kind is ClockKind.GAMMA:
        if spec.mu == 0:
            out = np.exp(-s * a * t)
        else:
            out = np.exp(-s * a * t - spec.mu * t * np.log1p(s / spec.rho))
    else:
        p = math.exp(-spec.lam * t)
        q = -math.expm1(-spec.lam * t)
        # 1 - q e^{-s} as p - q expm1(-s): exact at s = 0
        denom = p - q * np.expm1(-s)
        if np.any(np.abs(denom) == 0):
            raise SingularityError("birth-clock transform denominator vanishes")
        out = p * np.exp(-s * (a * t + 1.0)) / denom
    return complex(out) if out.ndim == 0 else out


def sample_clock(spec: TimeChangeSpec, t: float, rng: np.random.Generator, size=None):
    """Draws of ``a t + C(t)`` from the exact marginal law."""
    if t < 0:
        raise DomainError("time must be nonnegative")
    drift = spec.a * t
    if spec.kind is ClockKind.POISSON:
        c = rng.poisson(spec.lam * t, size)
    elif spec.kind is ClockKind.GAMMA:
        shape = spec.mu * t
        if shape == 0:
            c = np.zeros(size) if size is not None else 0.0
        else:
            c = rng.gamma(shape, 1.0 / spec.rho, size)
    else:
        c = rng.geometric(math.exp(-spec.lam * t), size)
    out = drift + np.asarray(c, dtype=float)
    return float(out) if out.ndim == 0 else out


def clock_quantile(spec: TimeChangeSpec, t: float, u):
    """Inverse CDF of the clock at time ``t``.

    Feeding the same uniforms at several times gives a coupling in which the
    clock is nondecreasing in ``t`` (each marginal law is stochastically
    increasing in ``t``).
    """
    u = np.asarray(u, dtype=float)
    drift = spec.a * t
    if spec.kind is ClockKind.POISSON:
        c = stats.poisson.ppf(u, spec.lam * t) if t > 0 else np.zeros_like(u)
    elif spec.kind is ClockKind.GAMMA:
        shape = spec.mu * t
        c = stats.gamma.ppf(u, shape, scale=1.0 / spec.rho) if shape > 0 else np.zeros_like(u)
    else:
        c = stats.geom.ppf(u, math.exp(-spec.lam * t)) if t > 0 else np.ones_like(u)
    return drift + c
