"""Periodic grid bookkeeping and Fourier-side calculus.

Everything in this package lives on a uniform tensor grid over the torus
[0, L)^n.  A field has two views: real samples at the grid points and
complex Fourier coefficients indexed by the integer mode lattice
(FFT layout, so mode j of an N-point axis is j for j < N/2 and j - N
above).  Coefficients use the "forward" normalisation: coefficient 0 is
the mean of the field, and a unit-amplitude wave sin(x) carries +-i/2 at
modes +-1.

Two wavenumber conventions coexist, on purpose:

* derivatives multiply by i*xi*(2*pi/L) with the Nyquist mode xi = N/2
  zeroed, which keeps odd derivatives real and antisymmetric;
* diffusion semigroup symbols use the full |xi|^2 lattice (the squared
  Nyquist frequency is unambiguous).

Squared Sobolev seminorms of order k enumerate every multi-index of that
order exactly once, without multinomial weights.  Accumulations go through
exactly rounded compensated summation so rate fits do not inherit
cancellation noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import GridMismatch

MAX_DIMENSION = 3
MAX_NORM_ORDER = 8


def fsum(values) -> float:
    """Exactly rounded sum of an array of floats."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def _multi_indices(k: int, n: int):
    """All n-tuples of nonnegative integers summing to k."""
    if n == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in _multi_indices(k - first, n - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic tensor grid: ``points`` samples per axis on [0, length)^n."""

    n: int
    points: int
    length: float = 2.0 * np.pi

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIMENSION:
            raise ValueError(f"dimension must be 1..{MAX_DIMENSION}, got {self.n}")
        if self.points < 8 or self.points % 2 != 0:
            raise ValueError(f"points per axis must be even and >= 8, got {self.points}")
        if not self.length > 0:
            raise ValueError(f"axis length must be positive, got {self.length}")

    @property
    def shape(self) -> tuple:
        return (self.points,) * self.n

    @property
    def size(self) -> int:
        return self.points**self.n

    @property
    def spacing(self) -> float:
        return self.length / self.points

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.n

    @property
    def volume(self) -> float:
        return self.length**self.n

    @cached_property
    def axis_coords(self) -> np.ndarray:
        return np.arange(self.points) * self.spacing

    def coords(self) -> tuple:
        """Meshgrid of physical coordinates, one array per axis (ij indexing)."""
        return tuple(np.meshgrid(*(self.axis_coords,) * self.n, indexing="ij"))

    @cached_property
    def modes(self) -> np.ndarray:
        """Integer mode numbers of one axis in FFT layout: 0..N/2-1, -N/2..-1."""
        return np.fft.fftfreq(self.points, d=1.0 / self.points).astype(int)

    def _axis_shaped(self, arr: np.ndarray, axis: int) -> np.ndarray:
        shape = [1] * self.n
        shape[axis] = self.points
        return arr.reshape(shape)

    def deriv_wavenumber(self, axis: int) -> np.ndarray:
        """Scaled wavenumbers for differentiation along ``axis``, Nyquist zeroed."""
        if not 0 <= axis < self.n:
            raise ValueError(f"axis {axis} out of range for dimension {self.n}")
        k = self.modes * (2.0 * np.pi / self.length)
        k[self.points // 2] = 0.0
        return self._axis_shaped(k, axis)

    @cached_property
    def laplace_symbol(self) -> np.ndarray:
        """|xi|^2 over the full lattice (Nyquist included), scaled by (2*pi/L)^2."""
        k2 = np.zeros(self.shape)
        for axis in range(self.n):
            k = self.modes * (2.0 * np.pi / self.length)
            k2 = k2 + self._axis_shaped(k, axis) ** 2
        return k2

    @cached_property
    def mode_magnitude(self) -> np.ndarray:
        """Euclidean norm of the integer mode vector at each lattice point."""
        m2 = np.zeros(self.shape)
        for axis in range(self.n):
            m2 = m2 + self._axis_shaped(self.modes.astype(float), axis) ** 2
        return np.sqrt(m2)

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True where any component of the mode vector is the Nyquist frequency."""
        mask = np.zeros(self.shape, dtype=bool)
        for axis in range(self.n):
            mask |= self._axis_shaped(self.modes == -(self.points // 2), axis)
        return mask

    @cached_property
    def conjugate_index_map(self) -> np.ndarray:
        """Flat index of the mode -xi (mod N per axis) for each lattice point."""
        idx = np.arange(self.points)
        neg = (-idx) % self.points
        grids = np.meshgrid(*(neg,) * self.n, indexing="ij")
        return np.ravel_multi_index(grids, self.shape).ravel()

    @property
    def max_wavenumber(self) -> float:
        """Largest scaled wavenumber magnitude on the lattice (corner mode)."""
        return (self.points // 2) * (2.0 * np.pi / self.length) * math.sqrt(self.n)


class ScalarField:
    """Real scalar field on a :class:`GridSpec` with lazy physical/spectral views.

    Fields are immutable by convention; operations return new instances.
    The two views are kept consistent: materialising one from the other is
    cached, and a spectral view that is not Hermitian-symmetric raises when
    its physical view is requested.
    """

    __slots__ = ("grid", "_values", "_spectral")

    def __init__(self, grid: GridSpec, values=None, spectral=None):
        if values is None and spectral is None:
            raise ValueError("a field needs at least one view")
        self.grid = grid
        if values is not None:
            values = np.asarray(values, dtype=float)
            if values.shape != grid.shape:
                raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
        if spectral is not None:
            spectral = np.asarray(spectral, dtype=complex)
            if spectral.shape != grid.shape:
                raise ValueError(f"spectral shape {spectral.shape} != grid shape {grid.shape}")
        self._values = values
        self._spectral = spectral

    @classmethod
    def from_values(cls, grid: GridSpec, values) -> "ScalarField":
        return cls(grid, values=values)

    @classmethod
    def from_spectral(cls, grid: GridSpec, spectral) -> "ScalarField":
        return cls(grid, spectral=spectral)

    @classmethod
    def from_function(cls, grid: GridSpec, fn) -> "ScalarField":
        return cls(grid, values=fn(*grid.coords()))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "ScalarField":
        return cls(grid, values=np.zeros(grid.shape))

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            back = np.fft.ifftn(self._spectral, norm="forward")
            scale = np.max(np.abs(back.real))
            if np.max(np.abs(back.imag)) > 1e-8 * max(scale, 1e-30):
                raise ValueError("spectral view is not Hermitian-symmetric; field is not real")
            self._values = back.real
        return self._values

    @property
    def spectral(self) -> np.ndarray:
        if self._spectral is None:
            self._spectral = np.fft.fftn(self._values, norm="forward")
        return self._spectral

    @property
    def mean(self) -> float:
        return float(self.spectral[(0,) * self.grid.n].real)

    def _binary(self, other, op):
        if not isinstance(other, ScalarField):
            return NotImplemented
        if other.grid != self.grid:
            raise GridMismatch("fields live on different grids")
        return ScalarField(self.grid, values=op(self.values, other.values))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return ScalarField(self.grid, values=self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, values=-self.values)


def transform_forward(field: ScalarField) -> ScalarField:
    """Materialise the spectral view; returns the field (idempotent)."""
    field.spectral
    return field


def transform_backward(field: ScalarField) -> ScalarField:
    """Materialise the physical view; returns the field (idempotent)."""
    field.values
    return field


def deriv_spectral(grid: GridSpec, spectral: np.ndarray, axis: int) -> np.ndarray:
    """Spectral coefficients of the partial derivative along ``axis``."""
    return spectral * (1j * grid.deriv_wavenumber(axis))


def spectral_derivative(field: ScalarField, axis: int) -> ScalarField:
    """Partial derivative along ``axis`` via the Fourier multiplier i*xi*(2*pi/L)."""
    return ScalarField.from_spectral(field.grid, deriv_spectral(field.grid, field.spectral, axis))


@lru_cache(maxsize=128)
def _sobolev_multiplier(grid: GridSpec, k: int) -> np.ndarray:
    """Sum over |alpha| = k of prod_j xi_j^(2*alpha_j), derivative convention."""
    squares = []
    for axis in range(grid.n):
        w = grid.deriv_wavenumber(axis) ** 2
        squares.append(np.broadcast_to(w, grid.shape))
    out = np.zeros(grid.shape)
    for alpha in _multi_indices(k, grid.n):
        term = np.ones(grid.shape)
        for axis, power in enumerate(alpha):
            if power:
                term = term * squares[axis] ** power
        out += term
    return out


def sobolev_norm(field: ScalarField, k: int) -> float:
    """Squared seminorm of order k: the sum over all multi-indices of that
    order of the squared L2 norm of the corresponding derivative.

    Order 0 is the plain squared L2 norm (full Parseval sum, Nyquist
    included); orders >= 1 follow the differentiation convention, so the
    value agrees exactly with differentiating first and taking order k-1.
    """
    if k < 0:
        raise ValueError("order must be nonnegative")
    if k > MAX_NORM_ORDER:
        raise ValueError(f"order capped at {MAX_NORM_ORDER}, got {k}")
    power = np.abs(field.spectral) ** 2
    if k == 0:
        return field.grid.volume * fsum(power)
    mult = _sobolev_multiplier(field.grid, k)
    return field.grid.volume * fsum(mult * power)


def inner_product(a: ScalarField, b: ScalarField) -> float:
    """L2 inner product over the torus (trapezoidal rule, which is exact
    rectangle summation on a periodic grid)."""
    if a.grid != b.grid:
        raise GridMismatch("inner product requires a shared grid")
    return a.grid.cell_volume * fsum(a.values * b.values)


def quadrature(field: ScalarField) -> float:
    """Integral of the field over the torus."""
    return field.grid.cell_volume * fsum(field.values)


def gradient_values(grid: GridSpec, spectral: np.ndarray) -> np.ndarray:
    """Physical-space gradient stacked on a leading axis, shape (n, *grid.shape)."""
    out = np.empty((grid.n,) + grid.shape)
    for axis in range(grid.n):
        out[axis] = np.fft.ifftn(deriv_spectral(grid, spectral, axis), norm="forward").real
    return out


def divergence_spectral(grid: GridSpec, components: np.ndarray) -> np.ndarray:
    """Spectral divergence of a physical-space vector field shaped (n, *grid.shape)."""
    out = np.zeros(grid.shape, dtype=complex)
    for axis in range(grid.n):
        out += deriv_spectral(grid, np.fft.fftn(components[axis], norm="forward"), axis)
    return out


def resample_values(grid: GridSpec, values: np.ndarray, points: int) -> np.ndarray:
    """Trigonometric interpolation of grid samples onto a finer uniform grid.

    Exact for band-limited data; Nyquist coefficients are split evenly
    between +-N/2 so real symmetry survives the padding.
    """
    if points == grid.points:
        return np.asarray(values, dtype=float)
    if points < grid.points or points % 2 != 0:
        raise ValueError("resampling target must be an even refinement")
    spec = np.fft.fftn(np.asarray(values, dtype=float), norm="forward")
    n, old = grid.n, grid.points
    half = old // 2
    padded = np.zeros((points,) * n, dtype=complex)
    # scatter each old coefficient to its signed frequency slot on the new lattice
    old_modes = np.fft.fftfreq(old, d=1.0 / old).astype(int)
    new_index = np.where(old_modes >= 0, old_modes, old_modes + points)
    ix = np.ix_(*(new_index,) * n)
    padded[ix] = spec
    # split Nyquist planes between +half and -half on each axis
    for axis in range(n):
        sel_pos = [slice(None)] * n
        sel_neg = [slice(None)] * n
        sel_pos[axis] = points - half  # slot of old mode -half
        sel_neg[axis] = half
        sel_pos, sel_neg = tuple(sel_pos), tuple(sel_neg)
        plane = padded[sel_pos] / 2.0
        padded[sel_pos] = plane
        padded[sel_neg] = padded[sel_neg] + plane
    return np.fft.ifftn(padded, norm="forward").real
