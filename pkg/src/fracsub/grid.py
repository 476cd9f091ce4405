"""Uniform periodic grids, spectral fields and density containers.

Fourier convention throughout: ``f~(xi) = int exp(i x xi) f(x) dx``, so the
transform of a density is its characteristic function.  Spatial nodes are
``x_j = x_min + j*dx`` for ``j = 0..n-1`` with ``dx = (x_max - x_min)/n``
(``x_max`` is the periodic image of ``x_min`` and is not a node).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridTooNarrowError, PreconditionError

EDGE_DECAY = 1e-12


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        n = int(self.n)
        if n < 8 or n & (n - 1):
            raise PreconditionError(f"grid size must be a power of two >= 8, got {self.n}")
        if not self.x_max > self.x_min:
            raise PreconditionError("grid requires x_max > x_min")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def xi(self) -> np.ndarray:
        """Frequency nodes in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def xi_max(self) -> float:
        return np.pi / self.dx

    def padded(self, factor: int) -> "Grid":
        """Grid with the same spacing covering ``factor`` times the length.

        The original nodes are a contiguous block of the padded grid, centred
        as far as the node lattice allows; see :meth:`window`.
        """
        factor = int(factor)
        if factor < 1 or factor & (factor - 1):
            raise PreconditionError("padding factor must be a power of two")
        if factor == 1:
            return self
        extra = (factor - 1) * self.n // 2
        x_min = self.x_min - extra * self.dx
        return Grid(x_min, x_min + factor * self.length, factor * self.n)

    def window(self, factor: int) -> slice:
        """Slice of a ``padded(factor)`` array that lands on this grid."""
        extra = (int(factor) - 1) * self.n // 2
        return slice(extra, extra + self.n)

    def index_of(self, x: float) -> int:
        j = int(round((x - self.x_min) / self.dx))
        if not 0 <= j < self.n or abs(self.x_min + j * self.dx - x) > 1e-9 * self.dx:
            raise PreconditionError(f"{x} is not a grid node")
        return j

    # Transforms -----------------------------------------------------------

    def forward(self, values: np.ndarray) -> np.ndarray:
        """Quadrature approximation of ``int exp(i x xi) f(x) dx`` at :attr:`xi`."""
        values = np.asarray(values)
        return self.dx * self.n * np.exp(1j * self.xi * self.x_min) * np.fft.ifft(values)

    def inverse(self, coefficients: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`forward` (periodic extension of the density)."""
        coefficients = np.asarray(coefficients)
        return np.fft.fft(coefficients * np.exp(-1j * self.xi * self.x_min)) / self.length

    def integrate(self, values: np.ndarray) -> float:
        return float(self.dx * np.sum(values))


@dataclass
class SpectralField:
    """Coefficients ``u~(xi_k)`` of a function on ``grid`` (FFT order)."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if self.coefficients.shape != (self.grid.n,):
            raise PreconditionError("one coefficient per frequency node is required")

    @classmethod
    def from_values(cls, grid: Grid, values) -> "SpectralField":
        return cls(grid, grid.forward(values))

    @classmethod
    def delta(cls, grid: Grid) -> "SpectralField":
        """The Dirac mass at the origin: the constant-one spectral field."""
        return cls(grid, np.ones(grid.n, dtype=complex))

    def to_values(self) -> np.ndarray:
        return self.grid.inverse(self.coefficients)

    def is_conjugate_symmetric(self, tol: float = 1e-10) -> bool:
        c = self.coefficients
        n = self.grid.n
        # xi_{-k} sits at index (n - k) % n; the Nyquist node has no partner.
        mirror = np.conj(c[(-np.arange(n)) % n])
        keep = np.arange(n) != n // 2
        return bool(np.max(np.abs(c - mirror)[keep]) <= tol * max(1.0, np.max(np.abs(c))))


@dataclass
class DensityResult:
    """Density values on a grid plus an optional point mass.

    ``retained_mass`` is the probability mass of the mixture terms that were
    kept before renormalisation (1 for exact routes).  ``values`` integrate to
    ``1 - atom_weight`` up to the mass of the law lying outside the grid.
    """

    grid: Grid
    values: np.ndarray
    atom_weight: float = 0.0
    atom_location: Optional[float] = None
    retained_mass: float = 1.0

    @property
    def mass(self) -> float:
        return self.atom_weight + self.grid.integrate(self.values)

    def moment(self, order: int) -> float:
        m = self.grid.integrate(self.grid.x ** order * self.values)
        if self.atom_location is not None:
            m += self.atom_weight * self.atom_location ** order
        return m

    def variance(self) -> float:
        mean = self.moment(1)
        return self.moment(2) - mean * mean

    def at(self, x: float) -> float:
        return float(self.values[self.grid.index_of(x)])


def check_edge_decay(grid: Grid, values, what: str = "function", tol: float = EDGE_DECAY):
    """Raise unless ``values`` is below ``tol`` at both grid edges."""
    values = np.abs(np.asarray(values))
    edge = max(values[0], values[-1])
    if edge >= tol:
        raise GridTooNarrowError(f"{what} is {edge:.3g} at the grid edge (needs < {tol:g})")
