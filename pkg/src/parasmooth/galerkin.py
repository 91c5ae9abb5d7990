"""Dense Galerkin oracle: a literal truncated-basis construction.

The evolution is projected onto a finite real trigonometric basis that is
exactly orthonormal in L2 of the torus, which turns the PDE into the dense
linear system  c'(t) = -A c(t) + F  with a symmetric positive semidefinite
stiffness matrix.  Solving it by symmetric eigendecomposition gives an
independent brute-force reference for the pseudospectral solver at small
scale: no FFT differentiation, no time stepping, assembly by plain
quadrature against closed-form basis gradients on a finer grid (at least
twice the highest retained frequency, so products with the coefficient
matrix are integrated exactly).

The basis choice (constant, then cosine/sine pairs ordered by |frequency|)
is this artifact's own; reports that use the oracle record it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import MethodMismatch, TooManyModes
from .grid import GridSpec, ScalarField, resample_values
from .problems import ProblemSpec

MAX_DENSE_MODES = 4096


@dataclass(frozen=True)
class BasisFunction:
    """One real trigonometric mode: kind is 'const', 'cos' or 'sin'."""

    freq: Tuple[int, ...]
    kind: str


def _canonical_frequencies(n: int, radius: int) -> List[Tuple[int, ...]]:
    """Nonzero frequency vectors with |components| <= radius, one per +- pair,
    ordered by (|freq|^2, lexicographic)."""
    out = []
    ranges = [range(-radius, radius + 1)] * n
    for vec in itertools.product(*ranges):
        if all(v == 0 for v in vec):
            continue
        neg = tuple(-v for v in vec)
        if vec < neg:
            continue
        out.append(vec)
    out.sort(key=lambda v: (sum(c * c for c in v), v))
    return out


class TrigBasis:
    """Ordered orthonormal trigonometric basis on the torus [0, L)^n."""

    def __init__(self, n: int, length: float, functions: Sequence[BasisFunction]):
        self.n = n
        self.length = length
        self.functions = tuple(functions)

    def __len__(self):
        return len(self.functions)

    @property
    def max_frequency(self) -> int:
        out = 0
        for fn in self.functions:
            out = max(out, max(abs(c) for c in fn.freq) if fn.freq else 0)
        return out

    @classmethod
    def leading(cls, grid: GridSpec, m: int) -> "TrigBasis":
        """The first m basis functions representable on ``grid``."""
        if m < 1:
            raise ValueError("basis size must be at least 1")
        if m > MAX_DENSE_MODES:
            raise TooManyModes(f"dense storage capped at {MAX_DENSE_MODES} modes, got {m}")
        radius = 1
        while True:
            functions = [BasisFunction(freq=(0,) * grid.n, kind="const")]
            for vec in _canonical_frequencies(grid.n, radius):
                functions.append(BasisFunction(freq=vec, kind="cos"))
                functions.append(BasisFunction(freq=vec, kind="sin"))
            if len(functions) >= m or radius >= grid.points:
                break
            radius += 1
        functions = functions[:m]
        top = max((max(abs(c) for c in fn.freq) for fn in functions), default=0)
        if top > grid.points // 2 - 1:
            raise TooManyModes(
                f"basis frequency {top} is not representable below the Nyquist mode of an "
                f"{grid.points}-point axis"
            )
        return cls(grid.n, grid.length, functions)

    def _phases(self, coords, freq) -> np.ndarray:
        scale = 2.0 * np.pi / self.length
        phase = np.zeros(coords[0].shape)
        for axis, component in enumerate(freq):
            if component:
                phase = phase + scale * component * coords[axis]
        return phase

    def values_on(self, coords) -> np.ndarray:
        """Basis values on coordinate meshes, shape (m, *mesh)."""
        vol = self.length**self.n
        out = np.empty((len(self.functions),) + coords[0].shape)
        for i, fn in enumerate(self.functions):
            if fn.kind == "const":
                out[i] = 1.0 / math.sqrt(vol)
            else:
                phase = self._phases(coords, fn.freq)
                wave = np.cos(phase) if fn.kind == "cos" else np.sin(phase)
                out[i] = wave * math.sqrt(2.0 / vol)
        return out

    def gradients_on(self, coords) -> np.ndarray:
        """Basis gradients on coordinate meshes, shape (m, n, *mesh)."""
        vol = self.length**self.n
        scale = 2.0 * np.pi / self.length
        out = np.zeros((len(self.functions), self.n) + coords[0].shape)
        for i, fn in enumerate(self.functions):
            if fn.kind == "const":
                continue
            phase = self._phases(coords, fn.freq)
            norm = math.sqrt(2.0 / vol)
            core = -np.sin(phase) if fn.kind == "cos" else np.cos(phase)
            for axis, component in enumerate(fn.freq):
                if component:
                    out[i, axis] = scale * component * norm * core
        return out


def _quadrature_mesh(n: int, length: float, points: int):
    axis = np.arange(points) * (length / points)
    return tuple(np.meshgrid(*(axis,) * n, indexing="ij"))


@dataclass(frozen=True)
class GalerkinSystem:
    """Dense projected system: stiffness A, load F, initial coefficients c0."""

    basis: TrigBasis
    A: np.ndarray
    F: np.ndarray
    c0: np.ndarray
    theta: float
    quadrature_points: int


def assemble_system(problem: ProblemSpec, m: int) -> GalerkinSystem:
    """Project the problem onto the first m basis functions by quadrature.

    The quadrature grid is at least twice as fine as the highest retained
    frequency and at least as fine as the problem grid, which integrates
    products of the coefficient matrix with basis gradients exactly.
    """
    basis = TrigBasis.leading(problem.grid, m)
    g = problem.grid
    points = max(4 * basis.max_frequency + 2, g.points)
    if points % 2:
        points += 1
    coords = _quadrature_mesh(g.n, g.length, points)
    weight = (g.length / points) ** g.n

    if problem.diffusion.matrix_fn is not None:
        entries = problem.diffusion.entries_at(coords)
    elif points == g.points:
        entries = problem.diffusion.entries
    else:
        entries = np.empty(coords[0].shape + (g.n, g.n))
        for i in range(g.n):
            for j in range(g.n):
                entries[..., i, j] = resample_values(g, problem.diffusion.entries[..., i, j], points)

    f_vals = resample_values(g, problem.forcing.values, points)
    u0_vals = resample_values(g, problem.initial.values, points)

    w = basis.values_on(coords)
    dw = basis.gradients_on(coords)
    flux = np.einsum("...ab,kb...->ka...", entries, dw)
    space_axes = tuple(range(2, 2 + g.n))
    A = np.tensordot(dw, flux, axes=(tuple([1] + list(space_axes)), tuple([1] + list(space_axes)))) * weight
    F = np.tensordot(w, f_vals, axes=(tuple(range(1, 1 + g.n)), tuple(range(g.n)))) * weight
    c0 = np.tensordot(w, u0_vals, axes=(tuple(range(1, 1 + g.n)), tuple(range(g.n)))) * weight
    return GalerkinSystem(basis, A, F, c0, theta=problem.diffusion.theta, quadrature_points=points)


def _phi1_dense(z: np.ndarray) -> np.ndarray:
    out = np.ones_like(z)
    nz = np.abs(z) > 1e-12
    out[nz] = np.expm1(z[nz]) / z[nz]
    return out


def solve_dense(system: GalerkinSystem, sample_times: Sequence[float]) -> np.ndarray:
    """Coefficient vectors at each time for c' = -A c + F.

    Uses the symmetric eigendecomposition A = Q diag(lam) Q^T, so
    c(t) = Q e^(-lam t) Q^T c0 + t Q phi1(-lam t) Q^T F; a zero eigenvalue
    (the mean mode) reduces to linear growth through the phi limit.
    """
    lam, q = np.linalg.eigh(system.A)
    y0 = q.T @ system.c0
    yf = q.T @ system.F
    out = np.empty((len(sample_times), len(system.basis)))
    for row, t in enumerate(sample_times):
        z = -lam * t
        out[row] = q @ (np.exp(z) * y0 + t * _phi1_dense(z) * yf)
    return out


def project(basis: TrigBasis, field: ScalarField) -> np.ndarray:
    """Coefficients of the field against the basis, by grid quadrature
    (exact when the grid resolves twice the highest basis frequency)."""
    g = field.grid
    if basis.max_frequency > g.points // 2 - 1:
        raise TooManyModes("field grid cannot resolve the basis for projection")
    w = basis.values_on(g.coords())
    weight = g.cell_volume
    return np.tensordot(w, field.values, axes=(tuple(range(1, 1 + g.n)), tuple(range(g.n)))) * weight


def reconstruct(basis: TrigBasis, coefficients: np.ndarray, grid: GridSpec) -> ScalarField:
    """Field on ``grid`` with the given basis coefficients."""
    w = basis.values_on(grid.coords())
    values = np.tensordot(coefficients, w, axes=(0, 0))
    return ScalarField.from_values(grid, values)


def heat_exact(problem: ProblemSpec, t: float) -> ScalarField:
    """Closed-form state at time t for constant isotropic diffusion.

    Written independently of the evolution module: the forced term uses
    expm1 directly, and the mean mode is special-cased by hand.
    """
    c = problem.diffusion.constant_isotropic_scale()
    if c is None:
        raise MethodMismatch("heat_exact requires constant isotropic diffusion")
    if t < 0:
        raise ValueError("time must be nonnegative")
    g = problem.grid
    k2 = g.laplace_symbol
    u0 = problem.initial.spectral
    f = problem.forcing.spectral
    coeff = np.empty(g.shape, dtype=complex)
    nz = k2 > 0
    decay = np.exp(-c * k2[nz] * t)
    coeff[nz] = decay * u0[nz] - np.expm1(-c * k2[nz] * t) / (c * k2[nz]) * f[nz]
    zero = (0,) * g.n
    coeff[zero] = u0[zero] + t * f[zero]
    return ScalarField.from_spectral(g, coeff)
