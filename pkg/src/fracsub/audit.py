"""Numerical cross-checks of printed reference constants against independent oracles.

Each check returns an :class:`AuditRow` with the computed value, the printed
value it is compared with, and whether the printed value survives.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy import integrate, optimize

from .processes import (ProcessSpec, birth_variance_printed, char_fn, gamma_clock_moment,
                        gamma_mixing_density, gamma_moment_wright_form, levy_exponent,
                        monte_carlo, variance_closed_form)
from .special_fn import WrightParams, wright_1psi1
from .stable import StableParams, rf_symbol, stable_abs_moment
from .subordinators import TimeChangeSpec, yule_pmf


@dataclass(frozen=True)
class AuditRow:
    check: str
    computed: float
    printed: float
    printed_holds: bool
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "computed", float(self.computed))
        object.__setattr__(self, "printed", float(self.printed))
        object.__setattr__(self, "printed_holds", bool(self.printed_holds))


def lk_log_integral(c: float, mu: float, xi: float) -> float:
    """``int (cos(xi s) - 1) mu exp(-c|s|)/|s| ds`` by adaptive quadrature."""
    def f(s):
        return (math.cos(xi * s) - 1.0) * math.exp(-c * s) / s if s > 0 else 0.0
    val, _ = integrate.quad(f, 0.0, math.inf, limit=400, epsabs=1e-13)
    return 2.0 * mu * val


def lk_constant_errors(mu: float, rho: float, xis=(0.5, 1.0, 2.0)) -> dict:
    """Max Levy-Khintchine mismatch against ``-mu log(1 + xi**2/rho)`` for both candidate rates."""
    out = {}
    for name, c in (("sqrt(rho)", math.sqrt(rho)), ("sqrt(2 rho)", math.sqrt(2 * rho))):
        out[name] = max(abs(lk_log_integral(c, mu, x) + mu * math.log1p(x * x / rho)) for x in xis)
    return out


def fit_gamma_levy_rate(mu: float, rho: float, s=None) -> float:
    """Least-squares ``c`` in ``mu exp(-c|s|)/|s|`` fitted to the mixing integral at alpha = 2."""
    s = np.linspace(0.5, 5.0, 46) if s is None else np.asarray(s)
    nu = gamma_mixing_density(StableParams(2.0), mu, rho, s)

    def resid(c):
        return np.log(nu) - np.log(mu * np.exp(-c[0] * s) / s)

    return float(optimize.least_squares(resid, [1.0]).x[0])


def audit_gamma_levy_rate(mu: float = 1.0, rho: float = 2.0) -> AuditRow:
    errs = lk_constant_errors(mu, rho)
    winners = [k for k, v in errs.items() if v <= 1e-3]
    fit = fit_gamma_levy_rate(mu, rho)
    return AuditRow("gamma-clock Levy rate c", fit, math.sqrt(2 * rho),
                    winners == ["sqrt(2 rho)"],
                    f"LK mismatch sqrt(rho)={errs['sqrt(rho)']:.2e} sqrt(2 rho)={errs['sqrt(2 rho)']:.2e};"
                    f" selected {'/'.join(winners) or 'none'}")


def birth_variance_series(a: float, lam: float, t: float) -> float:
    """sum_k P{B(t)=k} 2 (a t + k), summed to a geometric tail below 1e-17."""
    q = -math.expm1(-lam * t)
    k_max = 1 if q == 0 else math.ceil(math.log(1e-17) / math.log(q)) + 10
    ks = np.arange(1, k_max + 1)
    return float(np.sum(yule_pmf(lam, t, ks) * 2 * (a * t + ks)))


def audit_birth_variance(a: float = 1.0, lam: float = 1.0, t: float = 1.0,
                         samples: int = 0, seed: Optional[int] = None) -> AuditRow:
    series = birth_variance_series(a, lam, t)
    spec = ProcessSpec(StableParams(2.0), TimeChangeSpec.birth(a, lam))
    closed = variance_closed_form(spec, t)
    printed = birth_variance_printed(a, lam, t)
    note = f"series={series:.10g} closed={closed:.10g}"
    if samples:
        mc = float(np.var(monte_carlo(spec, t, samples, seed if seed is not None else 0)))
        note += f" monte_carlo={mc:.6g} (n={samples})"
    return AuditRow("Brownian birth-clock variance", series, printed,
                    abs(printed - series) <= 0.02 * series, note)


def audit_generator_sign(p: StableParams = StableParams(1.5, 0.5), a: float = 1.0, lam: float = 1.0,
                         t: float = 1.0, xis=(0.3, 1.0, 2.0), h: float = 1e-6) -> AuditRow:
    """Compare d/dt log char_fn with ``-a psi - lambda(1 - e^-psi)`` and the ``+lambda`` variant."""
    spec = ProcessSpec(p, TimeChangeSpec.poisson(a, lam))
    xis = np.asarray(xis)
    deriv = (np.log(char_fn(spec, t + h, xis)) - np.log(char_fn(spec, t - h, xis))) / (2 * h)
    psi = rf_symbol(p, xis)
    minus = -a * psi - lam * (-np.expm1(-psi))
    plus = -a * psi + lam * (-np.expm1(-psi))
    e_minus = float(np.max(np.abs(deriv - minus)))
    e_plus = float(np.max(np.abs(deriv - plus)))
    return AuditRow("Poisson-clock generator sign", e_minus, e_plus, e_plus <= 1e-6,
                    "computed/printed columns: max |d/dt log phi - eta| for -lambda / +lambda sign")


def audit_poisson_levy_density(lam: float = 3.0, xis=(0.5, 1.0, 2.0)) -> AuditRow:
    """Brownian Poisson clock: which jump density reproduces ``lambda(e^{-xi^2} - 1)``."""
    def density_error(nu):
        errs = []
        for xi in xis:
            val, _ = integrate.quad(lambda x: (math.cos(xi * x) - 1.0) * nu(x), -math.inf, math.inf,
                                    epsabs=1e-13)
            errs.append(abs(val - lam * math.expm1(-xi * xi)))
        return max(errs)

    consistent = lambda x: lam * math.exp(-x * x / 4) / (2 * math.sqrt(math.pi))
    printed = lambda x: lam * math.exp(-x * x / 2) / math.sqrt(2 * math.pi)
    e_printed = density_error(printed)
    return AuditRow("Brownian Poisson-clock nu(0)", consistent(0.0), printed(0.0), e_printed <= 1e-6,
                    f"LK mismatch consistent={density_error(consistent):.2e} printed={e_printed:.2e}")


def audit_gamma_diffusion(a: float = 0.5, mu: float = 1.0, rho: float = 1.0) -> AuditRow:
    """Diffusion coefficient of the Brownian gamma-clock process: ``-lim eta(xi)/xi^2``."""
    spec = ProcessSpec(StableParams(2.0), TimeChangeSpec.gamma(a, mu, rho))
    xi = 1e6
    A = float(-levy_exponent(spec, xi).real / xi ** 2)
    return AuditRow("Brownian gamma-clock diffusion A", A, 1.0, abs(A - 1.0) <= 1e-6, f"a={a}")


def audit_moment_wright(alpha: float = 1.0, gamma_order: float = 0.5, mu: float = 1.0, rho: float = 1.0,
                        a: float = 1.0, t: float = 1.0) -> AuditRow:
    """Generalized-Wright moment expression against quadrature."""
    quad = stable_abs_moment(alpha, gamma_order, 0.0) * gamma_clock_moment(gamma_order / alpha, a, mu, rho, t)
    wright = gamma_moment_wright_form(alpha, gamma_order, mu, rho, a, t)
    rel = abs(wright - quad) / abs(quad)
    return AuditRow(f"gamma-clock moment alpha={alpha} gamma={gamma_order}", quad, wright, rel <= 1e-6,
                    f"relative gap {rel:.3e}; ratio quad/wright={quad / wright:.8f}")


def audit_moment_constant_zero_drift(alpha: float = 1.0, gamma_order: float = 0.5, mu: float = 1.0,
                                     rho: float = 1.0, t: float = 1.0) -> AuditRow:
    """At a = 0 the series collapses to one term; isolates the prefactor."""
    quad = stable_abs_moment(alpha, gamma_order, 0.0) * gamma_clock_moment(gamma_order / alpha, 0.0, mu, rho, t)
    wright = gamma_moment_wright_form(alpha, gamma_order, mu, rho, 0.0, t)
    return AuditRow("gamma-clock moment prefactor (a=0)", quad, wright, abs(wright - quad) <= 1e-6 * quad,
                    f"ratio quad/wright={quad / wright:.10f}, sqrt(pi)={math.sqrt(math.pi):.10f}")


def audit_shift_sign(p: StableParams = StableParams(1.5, 0.5), lam: float = 1.0, t: float = 1.0,
                     xi: float = 1.0) -> AuditRow:
    """``I - O_{-1}`` in place of ``I - O_1``: does the propagator stay a characteristic function?"""
    psi = rf_symbol(p, xi)
    good = abs(np.exp(-lam * t * (-np.expm1(-psi))))
    bad = abs(np.exp(-lam * t * (-np.expm1(psi))))
    return AuditRow("shift operator index in the Poisson equation", float(good), float(bad), bad <= 1.0,
                    "computed=|propagator| with O_1, printed=|propagator| with O_-1; must be <= 1")


def audit_wright_pole_pairs() -> AuditRow:
    value = wright_1psi1(WrightParams(2.0, -1.0, 2.0, -1.0), 1.0)
    return AuditRow("1Psi1 with equal parameter pairs at z=1", value, 2.0, abs(value - 2.0) <= 1e-12,
                    "equal Gamma arguments cancel at every index, giving sum 1/j! = e")


def levy_defect(spec: ProcessSpec, xis=(0.3, 0.7, 1.0, 2.0)) -> float:
    """max |phi(xi; 1)**2 - phi(xi; 2)| over the probes; zero for Levy processes."""
    xis = np.asarray(xis)
    return float(np.max(np.abs(char_fn(spec, 1.0, xis) ** 2 - char_fn(spec, 2.0, xis))))


def audit_levy_property() -> List[AuditRow]:
    p = StableParams(1.5, 0.5)
    rows = []
    for name, clock in (("Poisson", TimeChangeSpec.poisson(1, 1)), ("gamma", TimeChangeSpec.gamma(1, 1, 1)),
                        ("birth", TimeChangeSpec.birth(1, 1))):
        d = levy_defect(ProcessSpec(p, clock))
        rows.append(AuditRow(f"Levy defect, {name} clock", d, 0.0, d <= 1e-12,
                             "max |phi(1)^2 - phi(2)|"))
    return rows


def run_all(samples: int = 0, seed: Optional[int] = None) -> List[AuditRow]:
    """Every audit; the Monte Carlo variance check runs only when ``samples > 0``."""
    return [
        audit_gamma_levy_rate(),
        audit_birth_variance(samples=samples, seed=seed),
        audit_generator_sign(),
        audit_poisson_levy_density(),
        audit_gamma_diffusion(),
        audit_moment_wright(1.0, 0.5),
        audit_moment_wright(0.5, 0.25),
        audit_moment_constant_zero_drift(),
        audit_shift_sign(),
        audit_wright_pole_pairs(),
        *audit_levy_property(),
    ]
