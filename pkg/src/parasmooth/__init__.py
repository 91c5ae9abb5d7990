"""Desk-scale laboratory for parabolic smoothing on the periodic torus.

A pseudospectral solver for u_t = div(D(x) grad u) + f(x), a dense
truncated-basis oracle, and monitors that measure how fast merely
square-integrable initial data gains derivatives.
"""

from .errors import (
    DecayTooSmall,
    GridMismatch,
    Infeasible,
    MethodMismatch,
    NotElliptic,
    ParasmoothError,
    ParseError,
    TooManyModes,
    UnknownSuite,
    UnstableStep,
    ValidationError,
    WindowTooSparse,
)
from .evolve import Method, Trajectory, apply_operator, cfl_step_size, mass_balance, solve
from .grid import GridSpec, ScalarField, inner_product, sobolev_norm, spectral_derivative
from .problems import (
    DiffusionField,
    ProblemSpec,
    RoughDataSpec,
    diagonal,
    ellipticity_theta,
    isotropic,
    manufactured_steady,
    rough_data_sampler,
    sine_1d,
    sine_rank1_2d,
)

__version__ = "0.1.0"

__all__ = [
    "DecayTooSmall",
    "DiffusionField",
    "GridMismatch",
    "GridSpec",
    "Infeasible",
    "Method",
    "MethodMismatch",
    "NotElliptic",
    "ParasmoothError",
    "ParseError",
    "ProblemSpec",
    "RoughDataSpec",
    "ScalarField",
    "TooManyModes",
    "Trajectory",
    "UnknownSuite",
    "UnstableStep",
    "ValidationError",
    "WindowTooSparse",
    "apply_operator",
    "cfl_step_size",
    "diagonal",
    "ellipticity_theta",
    "inner_product",
    "isotropic",
    "manufactured_steady",
    "mass_balance",
    "rough_data_sampler",
    "sine_1d",
    "sine_rank1_2d",
    "sobolev_norm",
    "solve",
    "spectral_derivative",
]
