"""Problem instances: diffusion matrices, forcing terms, and initial data.

The stock diffusion library is deliberately small and analytic, so every
field carries a closed-form matrix function (used by the dense oracle to
re-evaluate entries on its own quadrature grid) and a certified ellipticity
constant equal to the exact grid minimum of the smallest eigenvalue.

Rough initial data is a power-law spectrum with independent random phases:
|coefficient(xi)| = amplitude * |xi|^(-decay) on the integer mode lattice,
conjugate-paired so the field is real, Nyquist planes zeroed, mean set
separately.  At finite resolution such a field is a trigonometric
polynomial; its "roughness" is the divergence of the truncated first-order
seminorm sums under grid refinement, which reports state explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Optional

import numpy as np

from .errors import DecayTooSmall, GridMismatch, NotElliptic
from .grid import GridSpec, ScalarField


@dataclass(frozen=True)
class DiffusionField:
    """Symmetric matrix-valued coefficient on a grid with certified ellipticity.

    ``entries`` has shape grid.shape + (n, n) and is symmetric at every
    point; ``theta`` is the exact grid minimum of the smallest eigenvalue.
    ``matrix_fn`` maps coordinate meshes to entries of the same layout and
    is present for all stock fields (they are analytic).
    """

    grid: GridSpec
    entries: np.ndarray
    theta: float
    matrix_fn: Optional[Callable] = None
    label: str = "custom"

    def __post_init__(self):
        n = self.grid.n
        expected = self.grid.shape + (n, n)
        if self.entries.shape != expected:
            raise ValueError(f"entries shape {self.entries.shape} != {expected}")
        skew = np.max(np.abs(self.entries - np.swapaxes(self.entries, -1, -2)))
        scale = np.max(np.abs(self.entries))
        if skew > 1e-12 * max(scale, 1.0):
            raise ValueError("diffusion matrix must be symmetric at every grid point")

    @property
    def sup_eigenvalue(self) -> float:
        """Largest eigenvalue over the grid (the stiffness scale)."""
        if self.grid.n == 1:
            return float(np.max(self.entries[..., 0, 0]))
        return float(np.max(np.linalg.eigvalsh(self.entries)))

    def constant_isotropic_scale(self) -> Optional[float]:
        """The constant c if the field is exactly c * identity, else None."""
        n = self.grid.n
        c = float(self.entries[(0,) * n][0, 0])
        target = np.zeros((n, n))
        np.fill_diagonal(target, c)
        dev = np.max(np.abs(self.entries - target))
        if dev <= 1e-14 * max(abs(c), 1.0):
            return c
        return None

    def entries_at(self, coords) -> np.ndarray:
        """Entries evaluated on arbitrary coordinate meshes (stock fields only)."""
        if self.matrix_fn is None:
            raise ValueError("diffusion field carries no closed-form matrix function")
        return self.matrix_fn(*coords)


def ellipticity_theta(diffusion: DiffusionField) -> float:
    """Exact grid minimum of the smallest eigenvalue of D(x).

    No safety margin is subtracted.  Raises :class:`NotElliptic` if the
    minimum is not strictly positive.
    """
    if diffusion.grid.n == 1:
        smallest = float(np.min(diffusion.entries[..., 0, 0]))
    else:
        smallest = float(np.min(np.linalg.eigvalsh(diffusion.entries)))
    if smallest <= 0.0:
        raise NotElliptic(f"smallest grid eigenvalue is {smallest}")
    return smallest


def _certified(grid, entries, matrix_fn, label) -> DiffusionField:
    tentative = DiffusionField(grid, entries, theta=float("nan"), matrix_fn=matrix_fn, label=label)
    return DiffusionField(grid, entries, theta=ellipticity_theta(tentative), matrix_fn=matrix_fn, label=label)


def isotropic(grid: GridSpec, scale: float = 1.0) -> DiffusionField:
    """D(x) = scale * identity."""

    def fn(*coords):
        shape = coords[0].shape
        out = np.zeros(shape + (grid.n, grid.n))
        for i in range(grid.n):
            out[..., i, i] = scale
        return out

    return _certified(grid, fn(*grid.coords()), fn, f"isotropic(scale={scale})")


def diagonal(grid: GridSpec, values) -> DiffusionField:
    """Constant anisotropic diagonal D = diag(values)."""
    values = tuple(float(v) for v in values)
    if len(values) != grid.n:
        raise ValueError(f"need {grid.n} diagonal values, got {len(values)}")

    def fn(*coords):
        shape = coords[0].shape
        out = np.zeros(shape + (grid.n, grid.n))
        for i, v in enumerate(values):
            out[..., i, i] = v
        return out

    return _certified(grid, fn(*grid.coords()), fn, f"diagonal(values={list(values)})")


def sine_1d(grid: GridSpec, base: float = 1.5, amplitude: float = 1.0) -> DiffusionField:
    """One-dimensional d(x) = base + amplitude * sin(2*pi*x/L); theta = base - |amplitude|
    whenever the grid hits the extremum (N divisible by 4 on the default length)."""
    if grid.n != 1:
        raise ValueError("sine_1d is a one-dimensional stock field")

    def fn(x):
        out = np.zeros(x.shape + (1, 1))
        out[..., 0, 0] = base + amplitude * np.sin(2.0 * np.pi * x / grid.length)
        return out

    return _certified(grid, fn(*grid.coords()), fn, f"sine_1d(base={base}, amplitude={amplitude})")


def sine_rank1_2d(
    grid: GridSpec,
    base: float = 1.5,
    amplitude: float = 0.5,
    rank1: float = 0.5,
    direction=(1.0, 0.0),
) -> DiffusionField:
    """Two-dimensional (base + amplitude*sin x1 sin x2) * I + rank1 * v v^T.

    v is the normalised ``direction``; with rank1 >= 0 the closed-form
    ellipticity constant is base - |amplitude|.
    """
    if grid.n != 2:
        raise ValueError("sine_rank1_2d is a two-dimensional stock field")
    if rank1 < 0:
        raise ValueError("rank-one coefficient must be nonnegative")
    v = np.asarray(direction, dtype=float)
    v = v / np.linalg.norm(v)
    vvt = np.outer(v, v)

    def fn(x1, x2):
        scale = 2.0 * np.pi / grid.length
        s = base + amplitude * np.sin(scale * x1) * np.sin(scale * x2)
        out = np.zeros(x1.shape + (2, 2))
        out[..., 0, 0] = s
        out[..., 1, 1] = s
        out += rank1 * vvt
        return out

    label = f"sine_rank1_2d(base={base}, amplitude={amplitude}, rank1={rank1})"
    return _certified(grid, fn(*grid.coords()), fn, label)


@dataclass(frozen=True)
class RoughDataSpec:
    """Power-law spectral profile for initial data in L2 but (for small decay)
    outside H1: |coefficient| = amplitude * |xi|^(-decay)."""

    decay: float
    seed: int
    amplitude: float = 1.0
    mean: float = 0.0


def rough_data_sampler(spec: RoughDataSpec, grid: GridSpec) -> ScalarField:
    """Draw the rough field: prescribed modulus, uniform random phases paired
    so the field is real.  Deterministic for a fixed seed.

    Requires decay > n/2 so the modulus is square-summable on the infinite
    lattice; decay <= 1 + n/2 additionally puts the data outside H1 in the
    refinement limit.
    """
    if spec.decay <= grid.n / 2.0:
        raise DecayTooSmall(f"decay {spec.decay} <= n/2 = {grid.n / 2.0}; data would leave L2")
    rng = np.random.default_rng(spec.seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, grid.size)

    magnitude = grid.mode_magnitude.ravel()
    with np.errstate(divide="ignore"):
        modulus = spec.amplitude * np.where(magnitude > 0, magnitude, 1.0) ** (-spec.decay)
    modulus[magnitude == 0] = 0.0
    modulus[grid.nyquist_mask.ravel()] = 0.0

    conj = grid.conjugate_index_map
    idx = np.arange(grid.size)
    coeff = np.zeros(grid.size, dtype=complex)
    canonical = idx < conj
    coeff[canonical] = modulus[canonical] * np.exp(1j * phases[canonical])
    coeff[~canonical] = np.conj(coeff[conj[~canonical]])
    self_paired = idx == conj
    coeff[self_paired] = modulus[self_paired] * np.where(phases[self_paired] < np.pi, 1.0, -1.0)
    coeff = coeff.reshape(grid.shape)
    coeff[(0,) * grid.n] = spec.mean
    return ScalarField.from_spectral(grid, coeff)


def truncated_seminorm_sum(spec: RoughDataSpec, grid: GridSpec, order: int) -> float:
    """Lattice sum of |xi|^(2*order) * modulus^2 over the grid's modes.

    Direct summation from the sampler's modulus law (no field is built);
    used to certify roughness: the order-1 sum diverges under refinement
    when decay <= 1 + n/2.
    """
    magnitude = grid.mode_magnitude.ravel()
    keep = (magnitude > 0) & ~grid.nyquist_mask.ravel()
    mags = magnitude[keep]
    weights = mags ** (2 * order - 2 * spec.decay)
    return float(grid.volume * spec.amplitude**2 * np.sum(weights))


def manufactured_steady(diffusion: DiffusionField, u_target: ScalarField) -> ScalarField:
    """Forcing that makes ``u_target`` the steady state of the diffusion flow.

    The mean of the target is untouched (the forcing is divergence-form and
    mean-free), so steady states are matched up to their conserved mean.
    """
    from .evolve import apply_operator

    if u_target.grid != diffusion.grid:
        raise GridMismatch("target and diffusion live on different grids")
    return -apply_operator(diffusion, u_target)


@dataclass(frozen=True)
class ProblemSpec:
    """A complete evolution problem: coefficients, data, and a time horizon."""

    grid: GridSpec
    diffusion: DiffusionField
    forcing: ScalarField
    initial: ScalarField
    horizon: float
    label: str = ""
    roughness: Optional[RoughDataSpec] = dataclass_field(default=None)

    def __post_init__(self):
        for name, obj in (("diffusion", self.diffusion), ("forcing", self.forcing), ("initial", self.initial)):
            if obj.grid != self.grid:
                raise GridMismatch(f"{name} does not share the problem grid")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
