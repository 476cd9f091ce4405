"""Stable processes time-changed by Poisson, gamma and linear-birth clocks.

Densities, characteristic functions, samplers, moments, tail constants and
spectral solvers for the associated space-fractional equations.
"""
__version__ = "0.1.0"

from .errors import (DomainError, FracsubError, GridTooNarrowError, InstabilityError,
                     NonConvergenceError, NotLevyError, NumericalError, PreconditionError,
                     SingularityError, TruncationError, UnsupportedBranchError, ZeroModeError)
from .grid import DensityResult, Grid, SpectralField
from .stable import StableParams, rf_symbol, sample_stable, stable_abs_moment, stable_density_fft
from .subordinators import ClockKind, TimeChangeSpec
from .processes import (LevyTriplet, ProcessSpec, char_fn, frac_moment, levy_triplet, mixture_density,
                        monte_carlo, process_density_fft, sample_process, tail_constant,
                        variance_closed_form)
from .symbols import Symbol, apply_symbol
from .pde import (SolveConfig, solve_exp_equation, solve_log_equation, solve_nonlinear_birth,
                  step_operator_equation, verify_birth_drift_equation)
