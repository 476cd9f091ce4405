"""Spectral solvers for the space-fractional evolution equations.

Three equations are covered, all posed for ``u(x, t)`` on a periodic grid:

* ``u_t = [a D + lambda (I - O_1)] u`` (Poisson clock, exponential operator),
* ``u_t = [a D + mu P_{1/rho}] u`` (gamma clock, logarithmic operator),
* the birth-clock equation, which has a term in ``x u`` and is advanced in
  Fourier space where ``F{x u} = -i d/dxi F{u}``.

The first two have exact propagators; :func:`step_operator_equation` gives an
explicit RK4 cross-check through :func:`fracsub.symbols.apply_symbol`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, InstabilityError, NonConvergenceError
from .grid import DensityResult, Grid, SpectralField, check_edge_decay
from .stable import StableParams, psi, rf_symbol
from .symbols import Symbol, apply_symbol

IMAG_TOL = 1e-10
GROWTH_LIMIT = 10.0


@dataclass(frozen=True)
class SolveConfig:
    """Grid, horizon and initial condition of a solve.

    ``initial`` is ``"delta"`` (the constant-one spectrum), ``"stable1"`` (the
    stable density at time 1) or an array tabulated on ``grid``.
    """

    grid: Grid
    t_final: float
    dt: Optional[float] = None
    initial: Union[str, np.ndarray] = "delta"
    pad: int = 1

    def __post_init__(self):
        if self.t_final < 0:
            raise DomainError("t_final must be nonnegative")
        if self.dt is not None and not (self.dt > 0 and (self.t_final == 0 or self.dt <= self.t_final)):
            raise DomainError("dt must lie in (0, t_final]")
        if isinstance(self.initial, str):
            if self.initial not in ("delta", "stable1"):
                raise DomainError(f"unknown initial condition {self.initial!r}")
        else:
            values = np.asarray(self.initial, dtype=float)
            if values.shape != (self.grid.n,):
                raise DomainError("tabulated initial condition must match the grid")
            check_edge_decay(self.grid, values, "initial condition")
        if self.pad < 1 or self.pad & (self.pad - 1):
            raise DomainError("pad must be a power of two")

    @property
    def big(self) -> Grid:
        return self.grid.padded(self.pad)

    def initial_spectrum(self, p: Optional[StableParams] = None) -> np.ndarray:
        big = self.big
        if isinstance(self.initial, str):
            if self.initial == "delta":
                return np.ones(big.n, dtype=complex)
            if p is None:
                raise DomainError("stable1 initial condition needs stable parameters")
            return np.exp(-rf_symbol(p, big.xi))
        padded = np.zeros(big.n)
        padded[self.grid.window(self.pad)] = self.initial
        return big.forward(padded)


def _to_density(cfg: SolveConfig, coef: np.ndarray, atom: float = 0.0) -> DensityResult:
    full = cfg.big.inverse(coef)
    scale = max(1.0, float(np.max(np.abs(full.real))))
    if np.max(np.abs(full.imag)) > IMAG_TOL * scale:
        raise NonConvergenceError(f"solution has imaginary residue {np.max(np.abs(full.imag)):.2e}")
    values = full.real[cfg.grid.window(cfg.pad)]
    return DensityResult(cfg.grid, values, atom_weight=atom, atom_location=0.0 if atom else None)


def exp_equation_exponent(p: StableParams, a: float, lam: float, xi):
    """-(a psi + lambda (1 - exp(-psi))); zero at xi = 0."""
    psi = rf_symbol(p, xi)
    return -(a * psi + lam * (-np.expm1(-psi)))


def log_equation_exponent(alpha: float, a: float, mu: float, rho: float, xi):
    """-a |xi|**alpha - mu log(1 + |xi|**alpha / rho)."""
    s = np.abs(np.asarray(xi, dtype=float)) ** alpha
    return -a * s - mu * np.log1p(s / rho)


def solve_exp_equation(p: StableParams, a: float, lam: float, cfg: SolveConfig) -> DensityResult:
    """Exact Fourier propagator for ``u_t = [a D + lambda (I - O_1)] u``.

    With a delta start and ``a = 0`` the mass ``exp(-lambda t)`` that never
    moves is returned as an atom at the origin instead of a grid spike.
    """
    if a < 0 or not lam > 0:
        raise DomainError("needs a >= 0 and lambda > 0")
    t = cfg.t_final
    coef = cfg.initial_spectrum(p) * np.exp(t * exp_equation_exponent(p, a, lam, cfg.big.xi))
    atom = 0.0
    if a == 0 and isinstance(cfg.initial, str) and cfg.initial == "delta":
        atom = math.exp(-lam * t)
        coef = coef - atom
    return _to_density(cfg, coef, atom)


def solve_log_equation(alpha: float, a: float, mu: float, rho: float, cfg: SolveConfig) -> DensityResult:
    """Exact Fourier propagator for ``u_t = [a D^alpha + mu P_{1/rho}^alpha] u`` (symmetric case)."""
    if not 0 < alpha <= 2:
        raise DomainError("alpha must lie in (0, 2]")
    if a < 0 or not mu > 0 or not rho > 0:
        raise DomainError("needs a >= 0, mu > 0 and rho > 0")
    p = StableParams(alpha, 0.0)
    coef = cfg.initial_spectrum(p) * np.exp(cfg.t_final * log_equation_exponent(alpha, a, mu, rho, cfg.big.xi))
    return _to_density(cfg, coef)


# Explicit stepping -----------------------------------------------------------

def _generator_symbol(p: StableParams, a: float, rates) -> Symbol:
    if np.ndim(rates) == 0:
        lam = float(rates)
        if not lam > 0:
            raise DomainError("lambda must be positive")
        return Symbol.from_function(lambda xi: exp_equation_exponent(p, a, lam, xi),
                                    f"aD+lambda(I-O_1), a={a}, lambda={lam}")
    mu, rho = rates
    if p.theta != 0:
        raise DomainError("the logarithmic equation is symmetric: theta must be 0")
    if not mu > 0 or not rho > 0:
        raise DomainError("needs mu > 0 and rho > 0")
    return Symbol.from_function(lambda xi: log_equation_exponent(p.alpha, a, mu, rho, xi),
                                f"aD+mu P, a={a}, mu={mu}, rho={rho}")


def _rk4(field: SpectralField, sym: Symbol, dt: float, steps: int) -> SpectralField:
    start = float(np.max(np.abs(field.coefficients)))
    u = field
    for _ in range(steps):
        k1 = apply_symbol(u, sym).coefficients
        k2 = apply_symbol(SpectralField(u.grid, u.coefficients + 0.5 * dt * k1), sym).coefficients
        k3 = apply_symbol(SpectralField(u.grid, u.coefficients + 0.5 * dt * k2), sym).coefficients
        k4 = apply_symbol(SpectralField(u.grid, u.coefficients + dt * k3), sym).coefficients
        u = SpectralField(u.grid, u.coefficients + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))
        peak = float(np.max(np.abs(u.coefficients)))
        if not np.isfinite(peak) or peak > GROWTH_LIMIT * max(start, 1e-300):
            raise InstabilityError(f"spectral norm grew past {GROWTH_LIMIT}x; reduce dt")
    return u


def _step_spectrum(p, a, rates, cfg: SolveConfig, dt: float) -> np.ndarray:
    steps = max(1, int(round(cfg.t_final / dt)))
    if not math.isclose(steps * dt, cfg.t_final, rel_tol=1e-9):
        raise DomainError("t_final must be a whole number of steps")
    if cfg.t_final == 0:
        return cfg.initial_spectrum(p)
    sym = _generator_symbol(p, a, rates)
    return _rk4(SpectralField(cfg.big, cfg.initial_spectrum(p)), sym, dt, steps).coefficients


def step_operator_equation(p: StableParams, a: float, rates, cfg: SolveConfig, check_dt: bool = True,
                           agreement: float = 1e-6, max_halvings: int = 8) -> DensityResult:
    """Classical RK4 in time for either exact-propagator equation.

    ``rates`` is ``lambda`` for the exponential-operator equation or
    ``(mu, rho)`` for the logarithmic one.  The right side is evaluated per
    stage with :func:`apply_symbol`.  With ``check_dt`` the step is halved
    until two successive solutions agree to ``agreement`` in sup norm.
    """
    if cfg.dt is None:
        raise DomainError("the stepper needs dt")
    dt = cfg.dt
    coef = _step_spectrum(p, a, rates, cfg, dt)
    if check_dt:
        for _ in range(max_halvings):
            finer = _step_spectrum(p, a, rates, cfg, dt / 2)
            diff = np.max(np.abs(cfg.big.inverse(finer - coef)))
            coef, dt = finer, dt / 2
            if diff <= agreement:
                break
        else:
            raise NonConvergenceError("step halving did not settle")
    return _to_density(cfg, coef)


def richardson_ratio(p: StableParams, a: float, rates, cfg: SolveConfig) -> float:
    """error(dt) / error(dt/2) against the exact propagator; about 16 for RK4."""
    if cfg.dt is None:
        raise DomainError("needs dt")
    if np.ndim(rates) == 0:
        exponent = exp_equation_exponent(p, a, float(rates), cfg.big.xi)
    else:
        exponent = log_equation_exponent(p.alpha, a, rates[0], rates[1], cfg.big.xi)
    exact = cfg.initial_spectrum(p) * np.exp(cfg.t_final * exponent)
    errs = [np.max(np.abs(_step_spectrum(p, a, rates, cfg, h) - exact)) for h in (cfg.dt, cfg.dt / 2)]
    if errs[1] == 0:
        raise NonConvergenceError("error vanished; pick a larger dt")
    return float(errs[0] / errs[1])


# Birth-clock equation ---------------------------------------------------------

def _xi_derivative(u: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference d/dxi on a sorted uniform grid."""
    d = np.empty_like(u)
    d[2:-2] = (u[:-4] - 8 * u[1:-3] + 8 * u[3:-1] - u[4:]) / (12 * h)
    d[0] = (-25 * u[0] + 48 * u[1] - 36 * u[2] + 16 * u[3] - 3 * u[4]) / (12 * h)
    d[1] = (-3 * u[0] - 10 * u[1] + 18 * u[2] - 6 * u[3] + u[4]) / (12 * h)
    d[-1] = (25 * u[-1] - 48 * u[-2] + 36 * u[-3] - 16 * u[-4] + 3 * u[-5]) / (12 * h)
    d[-2] = (3 * u[-1] + 10 * u[-2] - 18 * u[-3] + 6 * u[-4] - u[-5]) / (12 * h)
    return d


def _check_birth_params(p: StableParams):
    if p.alpha == 2:
        if p.theta != 0:
            raise DomainError("the alpha = 2 birth equation needs theta = 0")
        return
    if not 1 < p.alpha < 2:
        raise DomainError("the birth equation needs alpha in (1, 2]")
    if abs(p.theta - (2 - p.alpha)) > 1e-12:
        raise DomainError("the birth equation holds only for theta = 2 - alpha")


@dataclass
class BirthSpectrum:
    """Evolved ``u_hat(xi, t)`` on the sorted frequency grid."""

    xi: np.ndarray
    values: np.ndarray
    t: float


def evolve_birth_spectrum(p: StableParams, a: float, lam: float, cfg: SolveConfig,
                          enforce_theta: bool = True) -> BirthSpectrum:
    """RK4 in time for

    ``u_t = a[-psi + lambda t (1 - e^-psi)] u
    + lambda (1 - e^-psi)/alpha |xi|**(1-alpha) e^{-i sign(xi)(theta-1) pi/2} (-i u_xi)``

    started from ``exp(-psi)``.  ``enforce_theta=False`` lets the coefficients
    be evaluated off the admissible ``theta = 2 - alpha`` line, which is only
    useful for studying limits.
    """
    if enforce_theta:
        _check_birth_params(p)
    if a < 0 or not lam > 0:
        raise DomainError("needs a >= 0 and lambda > 0")
    if cfg.dt is None and cfg.t_final > 0:
        raise DomainError("the birth solver needs dt")
    big = cfg.big
    xi = np.fft.fftshift(big.xi)
    h = float(xi[1] - xi[0])
    psi = rf_symbol(p, xi)
    one_minus = -np.expm1(-psi)
    phase = np.exp(-1j * np.sign(xi) * (p.theta - 1) * math.pi / 2)
    with np.errstate(divide="ignore"):
        power = np.where(xi == 0, 0.0, np.abs(xi) ** (1 - p.alpha))
    advect = lam * one_minus / p.alpha * power * phase
    advect[xi == 0] = 0.0

    def rhs(t, u):
        return a * (-psi + lam * t * one_minus) * u + advect * (-1j * _xi_derivative(u, h))

    if isinstance(cfg.initial, str) and cfg.initial == "stable1":
        u = np.exp(-psi)
    elif isinstance(cfg.initial, str):
        raise DomainError("the birth solver starts from the stable density at time 1")
    else:
        u = np.fft.fftshift(cfg.initial_spectrum(p))
    if cfg.t_final == 0:
        return BirthSpectrum(xi, u, 0.0)
    steps = int(round(cfg.t_final / cfg.dt))
    if not math.isclose(steps * cfg.dt, cfg.t_final, rel_tol=1e-9):
        raise DomainError("t_final must be a whole number of steps")
    dt = cfg.dt
    start = float(np.max(np.abs(u)))
    t = 0.0
    for i in range(steps):
        k1 = rhs(t, u)
        k2 = rhs(t + dt / 2, u + dt / 2 * k1)
        k3 = rhs(t + dt / 2, u + dt / 2 * k2)
        k4 = rhs(t + dt, u + dt * k3)
        u = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = (i + 1) * dt
        peak = float(np.max(np.abs(u)))
        if not np.isfinite(peak) or peak > GROWTH_LIMIT * start:
            raise InstabilityError("birth solver blew up; reduce dt")
    return BirthSpectrum(xi, u, t)


def solve_nonlinear_birth(p: StableParams, a: float, lam: float, cfg: SolveConfig) -> DensityResult:
    """Density of ``S(a t + B(t))`` from :func:`evolve_birth_spectrum`.

    The initial condition is always the stable density at time 1.
    """
    if isinstance(cfg.initial, str) and cfg.initial == "delta":
        cfg = SolveConfig(cfg.grid, cfg.t_final, cfg.dt, "stable1", cfg.pad)
    spec = evolve_birth_spectrum(p, a, lam, cfg)
    return _to_density(cfg, np.fft.ifftshift(spec.values))


# Linear-drift birth identity ---------------------------------------------------

def birth_drift_char_fn(a: float, lam: float, t: float, xi):
    """E exp(i xi (a t + B(t))) = e^{-lambda t + i xi (1 + a t)} / (1 - (1 - e^{-lambda t}) e^{i xi})."""
    xi = np.asarray(xi, dtype=float)
    p = math.exp(-lam * t)
    q = -math.expm1(-lam * t)
    out = p * np.exp(1j * xi * (1 + a * t)) / (p - q * np.expm1(1j * xi))
    return np.where(xi == 0, 1.0 + 0j, out)


def birth_drift_first_moment_transform(a: float, lam: float, t: float, xi, tol: float = 1e-17):
    """F{x q_a}(xi) = sum_k P{B(t)=k} (a t + k) e^{i xi (a t + k)}."""
    xi = np.asarray(xi, dtype=float)
    p = math.exp(-lam * t)
    q = 1 - p
    k_max = 1 if q == 0 else max(1, math.ceil(math.log(tol) / math.log(q)) + 10)
    out = np.zeros(xi.shape, dtype=complex)
    for k in range(1, k_max + 1):
        w = p * q ** (k - 1)
        out += w * (a * t + k) * np.exp(1j * xi * (a * t + k))
    return out


@dataclass(frozen=True)
class BirthDriftReport:
    max_residual: float
    residuals: np.ndarray
    t_points: np.ndarray
    xi_points: np.ndarray


def verify_birth_drift_equation(a: float, lam: float, t_points: Sequence[float],
                                xi_points: Sequence[float], h: float = 1e-6) -> BirthDriftReport:
    """Residual of ``Phi_t = a[lambda t (1 - e^{i xi}) + i xi] Phi - lambda (1 - e^{i xi}) F{x q_a}``.

    ``Phi_t`` is a central difference with step ``h``; the right side uses the
    closed-form ``Phi`` and the series for ``F{x q_a}``.
    """
    ts = np.asarray(t_points, dtype=float)
    xis = np.asarray(xi_points, dtype=float)
    if np.any(ts - h < 0):
        raise DomainError("probe times must exceed the difference step")
    res = np.zeros((ts.size, xis.size))
    for i, t in enumerate(ts):
        dphi = (birth_drift_char_fn(a, lam, t + h, xis) - birth_drift_char_fn(a, lam, t - h, xis)) / (2 * h)
        e = np.exp(1j * xis)
        rhs = (a * (lam * t * (1 - e) + 1j * xis) * birth_drift_char_fn(a, lam, t, xis)
               - lam * (1 - e) * birth_drift_first_moment_transform(a, lam, t, xis))
        res[i] = np.abs(dphi - rhs)
    return BirthDriftReport(float(res.max()) if res.size else 0.0, res, ts, xis)


def birth_limit_residual(alpha: float, a: float, lam: float, t: float, xi) -> np.ndarray:
    """Defect of the birth equation's coefficients at ``theta = -1`` on the ``alpha = 1`` solution.

    The exact characteristic function of ``a t + B(t)`` is inserted into the
    right side built with ``psi_{alpha,-1}``; the defect vanishes at
    ``alpha = 1`` and shrinks as ``alpha -> 1+``.
    """
    xi = np.asarray(xi, dtype=float)
    h = 1e-6
    dphi = (birth_drift_char_fn(a, lam, t + h, xi) - birth_drift_char_fn(a, lam, t - h, xi)) / (2 * h)
    psi_ = psi(alpha, -1.0, xi)
    one_minus = -np.expm1(-psi_)
    with np.errstate(divide="ignore"):
        power = np.where(xi == 0, 0.0, np.abs(xi) ** (1 - alpha))
    advect = lam * one_minus / alpha * power * np.exp(1j * np.sign(xi) * math.pi)
    rhs = (a * (-psi_ + lam * t * one_minus) * birth_drift_char_fn(a, lam, t, xi)
           + advect * birth_drift_first_moment_transform(a, lam, t, xi))
    return np.abs(dphi - rhs)
