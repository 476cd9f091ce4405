"""Stable processes run on the random clocks of :mod:`fracsub.subordinators`.

``Z(t) = S(a t + N(t))``, ``X(t) = S(a t + Gamma(t))`` and ``Y(t) = S(a t + B(t))``
with ``S`` an (alpha, theta) stable process independent of the clock.
Conditioning on the clock gives ``E exp(i xi P(t)) = E exp(-psi(xi) clock(t))``,
which is how every characteristic function here is evaluated.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, interpolate, special, stats

from .errors import (DomainError, GridTooNarrowError, NonConvergenceError, NotLevyError,
                     PreconditionError, TruncationError, UnsupportedBranchError)
from .grid import DensityResult, Grid
from .stable import (MAX_FFT_SIZE, StableParams, clip_renormalise, decay_refinement, image_padding,
                     invert_char_fn, levy_measure_constants, rf_symbol, sample_stable,
                     stable_abs_moment, stable_density_fft)
from .special_fn import WrightParams, wright_1psi1
from .subordinators import ClockKind, TimeChangeSpec, laplace_exponent, sample_clock, yule_pmf

MAX_MIXTURE_TERMS = 10_000
DEFAULT_WORKERS = 4
WORKERS_ENV = "FRACSUB_WORKERS"


@dataclass(frozen=True)
class ProcessSpec:
    stable: StableParams
    clock: TimeChangeSpec

    @property
    def kind(self) -> ClockKind:
        return self.clock.kind

    @property
    def is_levy(self) -> bool:
        return self.kind is not ClockKind.BIRTH


# Characteristic functions -------------------------------------------------

def char_fn(spec: ProcessSpec, t: float, xi):
    """E exp(i xi P(t)), i.e. the clock's Laplace transform at ``psi(xi)``."""
    if t < 0:
        raise DomainError("time must be nonnegative")
    return laplace_exponent(spec.clock, rf_symbol(spec.stable, xi), t)


def levy_exponent(spec: ProcessSpec, xi):
    """log E exp(i xi P(1)) for the two Levy cases."""
    psi = np.asarray(rf_symbol(spec.stable, xi))
    c = spec.clock
    if spec.kind is ClockKind.POISSON:
        out = -c.a * psi - c.lam * (-np.expm1(-psi))
    elif spec.kind is ClockKind.GAMMA:
        out = -c.a * psi - c.mu * np.log1p(psi / c.rho)
    else:
        raise NotLevyError("the birth-clock process is Markov but not Levy")
    return complex(out) if out.ndim == 0 else out


# Densities ------------------------------------------------------------------

def process_density_fft(spec: ProcessSpec, t: float, grid: Grid, pad: Optional[int] = None,
                        refine: Optional[int] = None) -> DensityResult:
    """Density by inverting :func:`char_fn` on the grid.

    ``refine`` defaults to the smallest factor with ``|char fn| < 1e-12`` at
    the Nyquist node; ``pad`` defaults to the padding a stable law at the
    clock's mean time would need.  A point mass (Poisson clock, ``a = 0``) is
    split off exactly before the inversion.
    """
    if not t > 0:
        raise DomainError("density needs t > 0")
    atom = 0.0
    if spec.kind is ClockKind.POISSON and spec.clock.a == 0:
        atom = math.exp(-spec.clock.lam * t)

    def cf(xi):
        return char_fn(spec, t, xi) - atom

    if refine is None:
        refine = 1
        while abs(cf(np.array([grid.xi_max * refine]))[0]) >= 1e-12:
            refine *= 2
            if refine * grid.n > MAX_FFT_SIZE:
                raise GridTooNarrowError("characteristic function does not decay on any affordable grid")
    fine = Grid(grid.x_min, grid.x_max, grid.n * refine)
    if pad is None:
        pad = image_padding(spec.stable, max(spec.clock.mean(t), 1e-300), fine)
    values = clip_renormalise(grid, invert_char_fn(cf, grid, pad, refine))
    return DensityResult(grid, values, atom_weight=atom, atom_location=0.0 if atom else None)


def _mixture_weights(spec: ProcessSpec, t: float, eps: float):
    """(times, weights, remaining_mass) of the clock's discrete law."""
    c = spec.clock
    if spec.kind is ClockKind.POISSON:
        m = c.lam * t
        k = 0
        while stats.poisson.sf(k, m) >= eps:
            k += 1
            if k > MAX_MIXTURE_TERMS:
                raise TruncationError("Poisson mixture needs more than 1e4 terms")
        ks = np.arange(k + 1)
        return c.a * t + ks, stats.poisson.pmf(ks, m), float(stats.poisson.sf(k, m))
    if spec.kind is ClockKind.BIRTH:
        q = -math.expm1(-c.lam * t)
        k = 1 if q == 0 else max(1, math.ceil(math.log(eps) / math.log(q)))
        if k > MAX_MIXTURE_TERMS:
            raise TruncationError("birth mixture needs more than 1e4 terms")
        ks = np.arange(1, k + 1)
        return c.a * t + ks, yule_pmf(c.lam, t, ks), q ** k
    raise PreconditionError("the gamma clock has no discrete mixture; use process_density_fft")


def mixture_density(spec: ProcessSpec, t: float, grid: Grid, truncation_eps: float = 1e-12,
                    pad: Optional[int] = None) -> DensityResult:
    """Density as the clock-weighted sum of stable densities.

    Terms are added until the clock mass left out drops below
    ``truncation_eps``; the kept mass is reported as ``retained_mass`` and the
    result is divided by it.  A zero clock time contributes an atom at the
    origin.  The gamma clock falls back to :func:`process_density_fft`.
    """
    if not 0 < truncation_eps <= 1e-3:
        raise DomainError("truncation_eps must lie in (0, 1e-3]")
    if not t > 0:
        raise DomainError("density needs t > 0")
    if spec.kind is ClockKind.GAMMA:
        return process_density_fft(spec, t, grid, pad=pad)
    times, weights, remaining = _mixture_weights(spec, t, truncation_eps)
    keep = weights > 0
    times, weights = times[keep], weights[keep]
    retained = float(np.sum(weights))
    atom = float(np.sum(weights[times == 0]))
    jumps = times > 0
    times, weights = times[jumps], weights[jumps]
    values = np.zeros(grid.n)
    if times.size:
        # one shared transform: finest resolution for the shortest time,
        # widest padding for the longest
        refine = decay_refinement(spec.stable, float(times.min()), grid)
        fine = Grid(grid.x_min, grid.x_max, grid.n * refine)
        if pad is None:
            pad = image_padding(spec.stable, float(times.max()), fine)

        def cf(xi):
            psi = rf_symbol(spec.stable, xi)
            out = np.zeros(np.shape(xi), dtype=complex)
            for s, w in zip(times, weights):
                out += w * np.exp(-s * psi)
            return out

        values = clip_renormalise(grid, invert_char_fn(cf, grid, pad, refine))
    return DensityResult(grid, values / retained, atom_weight=atom / retained,
                         atom_location=0.0 if atom else None, retained_mass=retained)


# Sampling -------------------------------------------------------------------

def sample_process(spec: ProcessSpec, t: float, rng: np.random.Generator, size=None):
    """Draw the clock, then the stable law at that random time."""
    clock = sample_clock(spec.clock, t, rng, size)
    if size is None:
        return 0.0 if clock == 0 else sample_stable(spec.stable, clock, rng)
    return sample_stable(spec.stable, clock, rng)


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    return max(1, int(env)) if env else DEFAULT_WORKERS


def monte_carlo(spec: ProcessSpec, t: float, n: int, seed: int, workers: Optional[int] = None) -> np.ndarray:
    """``n`` draws of ``P(t)`` split over independent worker streams.

    Worker ``i`` uses the ``i``-th child of ``SeedSequence(seed)``, so the
    output depends only on ``(seed, workers)``, never on scheduling.
    """
    workers = workers or default_workers()
    children = np.random.SeedSequence(seed).spawn(workers)
    sizes = [n // workers + (1 if i < n % workers else 0) for i in range(workers)]

    def run(i):
        return sample_process(spec, t, np.random.default_rng(children[i]), sizes[i])

    if workers == 1:
        return run(0)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.concatenate(list(pool.map(run, range(workers))))


# Moments --------------------------------------------------------------------

def variance_closed_form(spec: ProcessSpec, t: float) -> float:
    """Variance of the Brownian (alpha = 2) case: ``2 E[clock(t)]``.

    For the birth clock ``E B(t) = exp(lambda t)``; see
    :func:`birth_variance_printed` for the alternative printed constant.
    """
    if spec.stable.alpha != 2:
        raise DomainError("finite variance needs alpha = 2")
    return 2.0 * spec.clock.mean(t)


def birth_variance_printed(a: float, lam: float, t: float) -> float:
    """``2 (a t + 1/lambda)``, kept for comparison with :func:`variance_closed_form`."""
    return 2.0 * (a * t + 1.0 / lam)


def frac_moment(spec: ProcessSpec, gamma_order: float, t: float) -> float:
    """E|P(t)|**gamma for gamma in (-1, alpha).

    Conditioning on the clock gives ``E|S(1)|**gamma * E[clock(t)**(gamma/alpha)]``.
    The clock moment is a Poisson or geometric series for the discrete clocks
    and a quadrature for the gamma clock, cross-checked against the
    Tricomi-function closed form of :func:`gamma_clock_moment_closed_form`.
    """
    p = spec.stable
    g = gamma_order
    if not -1 < g < p.alpha:
        raise DomainError(f"moment order must lie in (-1, {p.alpha})")
    if g == 0:
        return 1.0
    if t < 0:
        raise DomainError("time must be nonnegative")
    const = stable_abs_moment(p.alpha, g, p.theta)
    q = g / p.alpha
    c = spec.clock
    if spec.kind is ClockKind.GAMMA:
        quad = gamma_clock_moment(q, c.a, c.mu, c.rho, t)
        closed = gamma_clock_moment_closed_form(q, c.a, c.mu, c.rho, t)
        if abs(quad - closed) > 1e-6 * abs(closed):
            raise NonConvergenceError(f"clock-moment routes disagree: {quad!r} vs {closed!r}")
        return const * quad
    if spec.kind is ClockKind.POISSON:
        m = c.lam * t
        if c.a == 0 and g < 0:
            # the atom at zero makes negative moments infinite
            raise DomainError("negative moments diverge when the clock has an atom at zero")
        k_max = int(m + 40 * math.sqrt(m) + 50)
        ks = np.arange(k_max + 1)
        times = c.a * t + ks
        pmf = stats.poisson.pmf(ks, m)
        with np.errstate(divide="ignore"):
            powers = np.where(times > 0, times, 1.0) ** q
        powers[times == 0] = 0.0
        return const * float(np.sum(pmf * powers))
    qq = -math.expm1(-c.lam * t)
    k_max = 1 if qq == 0 else max(1, math.ceil(math.log(1e-17) / math.log(qq)))
    if k_max > 10 * MAX_MIXTURE_TERMS:
        raise TruncationError("geometric series needs too many terms")
    ks = np.arange(1, k_max + 1)
    return const * float(np.sum(yule_pmf(c.lam, t, ks) * (c.a * t + ks) ** q))


def gamma_clock_moment(q: float, a: float, mu: float, rho: float, t: float) -> float:
    """E[(a t + Gamma(t))**q] by adaptive quadrature against the gamma density."""
    m = mu * t
    if m == 0:
        return (a * t) ** q
    c = a * t
    if m < 1:
        # v = s**m removes the s**(m-1) singularity
        def f(v):
            s = v ** (1 / m)
            return (c + s) ** q * math.exp(-rho * s)
        scale = rho ** m / special.gamma(m + 1)
        upper = (60.0 / rho) ** m
    else:
        def f(s):
            return (c + s) ** q * math.exp((m - 1) * math.log(s) - rho * s) if s > 0 else (
                c ** q if m == 1 else 0.0)
        scale = rho ** m / special.gamma(m)
        upper = (m + 60.0 + 20 * math.sqrt(m)) / rho
    mode = max(m - 1, 0) / rho
    pts = sorted({p for p in (mode, mode + 1 / rho) if 0 < p < upper})
    val, err = integrate.quad(f, 0.0, upper, points=pts or None, epsabs=0, epsrel=1e-13, limit=400)
    if err > 1e-10 * abs(val):
        raise NonConvergenceError(f"gamma-clock moment quadrature error {err:.2e}")
    return scale * val


def gamma_clock_moment_closed_form(q: float, a: float, mu: float, rho: float, t: float) -> float:
    """E[(c + Gamma(t))**q] = (rho c)**(mu t) c**q U(mu t, mu t + q + 1, rho c), ``c = a t``.

    U is Tricomi's confluent hypergeometric function; ``c = 0`` reduces to the
    gamma moment ``Gamma(mu t + q) / (Gamma(mu t) rho**q)``.
    """
    m = mu * t
    c = a * t
    if m == 0:
        return c ** q
    if rho * c < 1e-14:
        # U overflows for tiny arguments; the drift is then invisible at double precision
        if m + q <= 0:
            if c > 0:
                raise NonConvergenceError("moment dominated by a negligible drift; use quadrature")
            raise DomainError("moment diverges: mu t + gamma/alpha <= 0")
        return float(math.exp(special.gammaln(m + q) - special.gammaln(m)) / rho ** q)
    z = rho * c
    u = special.hyperu(m, m + q + 1, z)
    if not np.isfinite(u):
        raise NonConvergenceError("Tricomi U evaluation failed")
    return float(z ** m * c ** q * u)


def gamma_moment_wright_form(alpha: float, gamma_order: float, mu: float, rho: float,
                             a: float, t: float) -> float:
    """The generalized-Wright expression for E|X(t)|**gamma in its printed form.

    ``2 sin(pi g/2) Gamma(g+1) / (alpha sqrt(pi) sin(pi g/alpha) Gamma(mu t) rho**(g/alpha))
    * 1Psi1(rho a t | (g/alpha + mu t, -1), (g/alpha + 1, -1))``.

    Kept for auditing: it rests on a termwise binomial expansion of
    ``(a t + s)**(g/alpha)`` that is only valid for ``s > a t``.
    """
    g = gamma_order
    if not -1 < g < alpha or g == 0:
        raise DomainError("needs gamma in (-1, alpha), gamma != 0")
    q = g / alpha
    m = mu * t
    psi11 = wright_1psi1(WrightParams(q + m, -1.0, q + 1, -1.0), rho * a * t)
    pref = (2 * math.sin(math.pi * g / 2) * special.gamma(g + 1)
            / (alpha * math.sqrt(math.pi) * math.sin(math.pi * q) * special.gamma(m) * rho ** q))
    return float(pref * psi11)


# Tails ----------------------------------------------------------------------

def tail_constant(spec: ProcessSpec, t: float) -> tuple[float, float]:
    """(right, left) limits of ``x**alpha P(+-P(t) > x)``.

    Only the totally skewed branch ``alpha in (0, 1)``, ``theta = -alpha`` is
    supported; there ``P(S(T) > x) ~ T x**-alpha / Gamma(1 - alpha)`` and the
    clock enters through its mean.
    """
    p = spec.stable
    if not (0 < p.alpha < 1 and abs(p.theta + p.alpha) < 1e-12):
        raise UnsupportedBranchError("tail constants are validated only for alpha < 1, theta = -alpha")
    return spec.clock.mean(t) / special.gamma(1 - p.alpha), 0.0


@dataclass(frozen=True)
class TailEstimate:
    probes: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    exceedances: np.ndarray


MIN_TAIL_SAMPLES = 100_000


def empirical_tail(samples, alpha: float, probe_points: Sequence[float]) -> TailEstimate:
    """``x**alpha * P_n(X > x)`` with binomial standard errors."""
    samples = np.sort(np.asarray(samples, dtype=float))
    n = samples.size
    if n < MIN_TAIL_SAMPLES:
        raise PreconditionError(f"need at least {MIN_TAIL_SAMPLES} samples, got {n}")
    probes = np.asarray(probe_points, dtype=float)
    counts = n - np.searchsorted(samples, probes, side="right")
    surv = counts / n
    scale = probes ** alpha
    return TailEstimate(probes, scale * surv, scale * np.sqrt(surv * (1 - surv) / n), counts)


def quantile_probes(samples, levels=(0.999, 0.9995, 0.9999)) -> np.ndarray:
    return np.quantile(np.asarray(samples), levels)


# Levy triplets --------------------------------------------------------------

@dataclass
class LevyTriplet:
    """Triplet in the convention
    ``eta(xi) = i gamma xi - A xi**2 + int (exp(i xi x) - 1 - i xi x 1{|x|<=1}) nu(dx)``.
    """

    diffusion_A: float
    drift_gamma: float
    x: np.ndarray
    levy_density: np.ndarray

    def __post_init__(self):
        if np.any(self.x == 0):
            raise PreconditionError("the Levy density is tabulated away from the origin")
        if np.any(self.levy_density < 0):
            raise PreconditionError("Levy density must be nonnegative")

    def small_jump_integral(self, power: float) -> float:
        """Grid quadrature of ``int_{|x|<=1} |x|**power nu(dx)``."""
        dx = float(np.min(np.diff(np.sort(self.x))))
        m = np.abs(self.x) <= 1
        return float(dx * np.sum(np.abs(self.x[m]) ** power * self.levy_density[m]))

    def exponent(self, xi: float, cutoff: float = 1.0) -> complex:
        """Levy-Khintchine exponent rebuilt from the tabulated triplet."""
        dx = float(np.min(np.diff(np.sort(self.x))))
        x = self.x
        comp = 1j * xi * x * (np.abs(x) <= cutoff)
        jumps = dx * np.sum((np.exp(1j * xi * x) - 1 - comp) * self.levy_density)
        return 1j * self.drift_gamma * xi - self.diffusion_A * xi * xi + jumps


def stable_levy_density(p: StableParams, x):
    P, Q = levy_measure_constants(p)
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, P, Q) * np.abs(x) ** (-1 - p.alpha)


def _stable_drift(p: StableParams) -> float:
    """Drift of S under the ``1{|x|<=1}`` compensator."""
    if p.alpha in (1, 2):
        return 0.0
    P, Q = levy_measure_constants(p)
    return (P - Q) / (1 - p.alpha)


def _standard_density_interpolant(p: StableParams, half_width: float = 200.0, n: int = 2 ** 16):
    """p(y; 1) by a cubic spline on [-W, W], with the power tail beyond."""
    grid = Grid(-half_width, half_width, n)
    dens = stable_density_fft(p, 1.0, grid).values
    spline = interpolate.CubicSpline(grid.x, dens)
    P, Q = levy_measure_constants(p)

    def density(y):
        y = np.asarray(y, dtype=float)
        inside = np.abs(y) < half_width * 0.99
        out = np.where(y > 0, P, Q) * np.abs(np.where(inside, 1.0, y)) ** (-1 - p.alpha)
        out[inside] = spline(y[inside])
        return out

    return density


def levy_triplet(spec: ProcessSpec, x=None) -> LevyTriplet:
    """Levy triplet tabulated at the nonzero points ``x``.

    Poisson clock: ``nu = a nu_S + lambda p(., 1)``; gamma clock:
    ``nu = a nu_S + mu int_0^inf s**-1 exp(-rho s) p(.; s) ds``.  For
    ``alpha = 2`` the closed forms ``lambda exp(-x**2/4)/(2 sqrt(pi))`` and
    ``mu exp(-sqrt(rho)|x|)/|x|`` are used, with ``A = a``.  The default
    points are the nodes of ``Grid(-20, 20, 2048)``.
    """
    x = Grid(-20.0, 20.0, 2048).x if x is None else np.asarray(x, dtype=float)
    x = x[x != 0]
    p = spec.stable
    c = spec.clock
    if spec.kind is ClockKind.BIRTH:
        raise NotLevyError("the birth-clock process is Markov but not Levy")
    if p.alpha == 2:
        if spec.kind is ClockKind.POISSON:
            nu = c.lam * np.exp(-x * x / 4) / (2 * math.sqrt(math.pi))
        else:
            nu = c.mu * np.exp(-math.sqrt(c.rho) * np.abs(x)) / np.abs(x)
        return LevyTriplet(c.a, 0.0, x, nu)
    dens1 = _standard_density_interpolant(p)
    base = c.a * stable_levy_density(p, x) if c.a > 0 else np.zeros_like(x)
    if spec.kind is ClockKind.POISSON:
        nu = base + c.lam * dens1(x)
        yy = np.linspace(-1, 1, 20001)
        first = integrate.trapezoid(yy * dens1(yy), yy)
        return LevyTriplet(0.0, c.a * _stable_drift(p) + c.lam * first, x, nu)
    if p.theta != 0:
        raise UnsupportedBranchError("gamma-clock triplet is implemented for symmetric S only")
    if c.mu == 0:
        return LevyTriplet(0.0, 0.0, x, base)
    return LevyTriplet(0.0, 0.0, x, base + gamma_mixing_density(p, c.mu, c.rho, x, dens1))


def gamma_mixing_density(p: StableParams, mu: float, rho: float, x, density1=None) -> np.ndarray:
    """``mu int_0^inf s**-1 exp(-rho s) p(x; s) ds`` by trapezoid in ``u = log s``.

    Self-similarity gives ``p(x; s) = s**(-1/alpha) p(x s**(-1/alpha); 1)``.
    ``density1`` is the time-one density; the Gaussian is used for alpha = 2.
    """
    if density1 is None:
        if p.alpha == 2:
            def density1(y):
                return np.exp(-np.asarray(y) ** 2 / 4) / (2 * math.sqrt(math.pi))
        else:
            density1 = _standard_density_interpolant(p)
    x = np.asarray(x, dtype=float)
    u = np.linspace(-60.0, math.log(60.0 / rho), 6001)
    s = np.exp(u)
    scale = s ** (-1.0 / p.alpha)
    weight = scale * np.exp(-rho * s)
    mix = np.empty_like(x)
    for i, xv in enumerate(x.ravel()):
        mix.flat[i] = integrate.trapezoid(weight * density1(xv * scale), u)
    return mu * mix
