"""Regularity monitors: norm series, weighted energies, and inequality checks.

The monitors post-process trajectories into sampled seminorm series
||grad^k u(t)||_2^2 and the weighted energies

    M1(t) = ||u||^2 + (theta*t/2) * ||grad u||^2,
    M(t)  = sum_k (theta*t)^k / (2^k k!) * ||grad^k u||^2,

then test what a bounded-smoothing flow must satisfy: per-sample decay
inequalities, exponential-envelope (Gronwall-style) boundedness of the
energies, power-law blow-up rates no worse than t^(-k), contraction of
perturbed twins, first-order time continuity away from t = 0, and the
integrated weak form of the equation against truncated test modes.

Fitted constants are reported, never compared against symbolic constants:
constants appearing in the inequalities are fitted as the smallest values
making every sample feasible, and coefficient-dependent quantities are
grid estimates.  Time derivatives use centered three-point stencils with
exact nonuniform weights, so log-spaced sampling injects no first-order
bias into the checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from . import grid as gridmod
from .errors import Infeasible, WindowTooSparse
from .evolve import Method, Trajectory, solve
from .galerkin import TrigBasis
from .grid import ScalarField, fsum, sobolev_norm
from .problems import ProblemSpec

STANDARD_MAX_ORDER = 4


@dataclass(frozen=True)
class NormSeries:
    """Squared Sobolev seminorms of one trajectory, rows k = 0..max_order."""

    times: np.ndarray
    norms: np.ndarray
    theta: float
    u0_l2_sq: float
    f_hk_sq: np.ndarray  # squared H^k norms of the forcing, k = 0..max_order

    @property
    def max_order(self) -> int:
        return self.norms.shape[0] - 1

    def sobolev_sq(self, k: int) -> np.ndarray:
        """Squared full H^k norm series: sum of seminorm rows 0..k."""
        return self.norms[: k + 1].sum(axis=0)


def norm_series(trajectory: Trajectory, max_order: int) -> NormSeries:
    if max_order < 0 or max_order > gridmod.MAX_NORM_ORDER:
        raise ValueError(f"max_order must lie in 0..{gridmod.MAX_NORM_ORDER}")
    times = np.asarray(trajectory.sample_times)
    norms = np.empty((max_order + 1, times.size))
    for j, state in enumerate(trajectory.states):
        for k in range(max_order + 1):
            norms[k, j] = sobolev_norm(state, k)
    f_semi = np.array([sobolev_norm(trajectory.problem.forcing, k) for k in range(max_order + 1)])
    return NormSeries(
        times=times,
        norms=norms,
        theta=trajectory.problem.diffusion.theta,
        u0_l2_sq=sobolev_norm(trajectory.problem.initial, 0),
        f_hk_sq=np.cumsum(f_semi),
    )


def energy_weights(theta: float, t: float, order: int) -> np.ndarray:
    """Weights (theta*t)^k / (2^k k!) for k = 0..order, by recurrence."""
    w = np.empty(order + 1)
    w[0] = 1.0
    for k in range(1, order + 1):
        w[k] = w[k - 1] * (theta * t) / (2.0 * k)
    return w


@dataclass(frozen=True)
class EnergySeries:
    """The two weighted energies along a run; ``initial`` is their common
    value at t = 0 (only the k = 0 term survives there)."""

    times: np.ndarray
    m1: np.ndarray
    m_weighted: np.ndarray
    order: int
    theta: float
    initial: float


def energy_series(series: NormSeries, order: Optional[int] = None) -> EnergySeries:
    if order is None:
        order = series.max_order
    if order < 1 or order > series.max_order:
        raise ValueError(f"energy order must lie in 1..{series.max_order}")
    m1 = series.norms[0] + 0.5 * series.theta * series.times * series.norms[1]
    mw = np.empty_like(m1)
    for j, t in enumerate(series.times):
        w = energy_weights(series.theta, t, order)
        mw[j] = fsum(w * series.norms[: order + 1, j])
    return EnergySeries(
        times=series.times,
        m1=m1,
        m_weighted=mw,
        order=order,
        theta=series.theta,
        initial=series.u0_l2_sq,
    )


@dataclass(frozen=True)
class RateFit:
    """Log-log least-squares fit of one seminorm row against time."""

    order: int
    window: Tuple[float, float]
    slope: float
    intercept: float
    r2: float
    predicted: Optional[float]
    samples: int

    @property
    def prefactor(self) -> float:
        """exp(intercept): the fitted constant in norm ~ prefactor * t^slope."""
        return math.exp(self.intercept)


def rate_fit(
    series: NormSeries,
    k: int,
    window: Tuple[float, float],
    predicted: Optional[float] = None,
) -> RateFit:
    lo, hi = window
    mask = (series.times >= lo * (1 - 1e-12)) & (series.times <= hi * (1 + 1e-12))
    mask &= series.norms[k] > 0
    count = int(np.count_nonzero(mask))
    if count < 8:
        raise WindowTooSparse(f"rate fit needs >= 8 positive samples in window, found {count}")
    x = np.log(series.times[mask])
    y = np.log(series.norms[k, mask])
    design = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    total = y - y.mean()
    denom = float(total @ total)
    r2 = 1.0 if denom == 0 else 1.0 - float(resid @ resid) / denom
    return RateFit(
        order=k,
        window=(float(lo), float(hi)),
        slope=float(coef[0]),
        intercept=float(coef[1]),
        r2=r2,
        predicted=predicted,
        samples=count,
    )


@dataclass(frozen=True)
class SmoothingBound:
    """Sampled check of t^k * norm_k(t) <= C_T * (||u0||^2 + ||f||_{H^k}^2)."""

    order: int
    fitted_ct: float
    sup_time: float
    passed: bool


def check_smoothing_bound(series: NormSeries, k: int) -> SmoothingBound:
    """Bound t^k * norm_k / (||u0||^2 + ||f||_{H^k}^2) over the sampled window.

    The supremum is reported as the fitted constant.  The check fails only
    when the ratio peaks at the earliest sample *and* keeps growing toward
    t = 0 (the signature of a series that blows up faster than t^(-k));
    a bounded series peaks later or flattens out near the left edge.
    """
    if k < 1:
        raise ValueError("smoothing bound applies to orders k >= 1")
    if k > series.max_order:
        raise ValueError(f"series only carries orders up to {series.max_order}")
    denom = series.u0_l2_sq + series.f_hk_sq[k]
    g = series.times**k * series.norms[k] / denom
    peak = int(np.argmax(g))
    head = g[: min(4, g.size)]
    flat_near_zero = bool(np.all(np.diff(head) >= -1e-9 * np.max(g)))
    passed = peak != 0 or flat_near_zero
    return SmoothingBound(order=k, fitted_ct=float(np.max(g)), sup_time=float(series.times[peak]), passed=passed)


def _derivative_stencil(times: np.ndarray, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Centered first derivatives at interior samples with exact nonuniform
    three-point weights (order two on any spacing)."""
    if times.size < 3:
        raise WindowTooSparse("derivative stencil needs at least 3 samples")
    h1 = times[1:-1] - times[:-2]
    h2 = times[2:] - times[1:-1]
    wm = -h2 / (h1 * (h1 + h2))
    w0 = (h2 - h1) / (h1 * h2)
    wp = h1 / (h2 * (h1 + h2))
    deriv = wm * values[..., :-2] + w0 * values[..., 1:-1] + wp * values[..., 2:]
    return times[1:-1], deriv


@dataclass(frozen=True)
class DissipationCheck:
    """Per-order decay inequality with the smallest feasible constant.

    Order 0 uses the full ellipticity constant against the next seminorm
    and the first-order forcing norm; higher orders use theta/2 and the
    same-order data norms.  Constants are grid estimates.
    """

    orders: Tuple[int, ...]
    feasible_c: Tuple[float, ...]
    max_defect: float

    def constant(self, k: int) -> float:
        return self.feasible_c[self.orders.index(k)]


def check_dissipation(series: NormSeries, trajectory: Optional[Trajectory] = None) -> DissipationCheck:
    """Fit the smallest C making every sampled decay inequality feasible.

    For each order k <= max_order - 1, forms d/dt norm_k / 2 by centered
    differences and requires it to stay below
    C * (||f||_{H^v}^2 + ||u||_{H^k}^2) - theta_k * norm_{k+1}, where
    theta_0 = theta, v = max(k, 1), and theta_k = theta/2 for k >= 1.
    ``max_defect`` is the worst inequality violation at the fitted
    constants (zero unless roundoff bites).
    """
    if trajectory is not None and not np.allclose(series.times, np.asarray(trajectory.sample_times)):
        raise ValueError("norm series and trajectory sample different times")
    orders = tuple(range(series.max_order))
    constants = []
    max_defect = 0.0
    for k in orders:
        mid, deriv = _derivative_stencil(series.times, series.norms[k])
        lhs = 0.5 * deriv
        theta_k = series.theta if k == 0 else 0.5 * series.theta
        diss = theta_k * series.norms[k + 1, 1:-1]
        f_term = series.f_hk_sq[max(k, 1)]
        u_term = series.sobolev_sq(k)[1:-1]
        denom = f_term + u_term
        ratio = (lhs + diss) / np.maximum(denom, 1e-300)
        c_fit = max(0.0, float(np.max(ratio)))
        constants.append(c_fit)
        defect = float(np.max(lhs + diss - c_fit * denom))
        max_defect = max(max_defect, defect)
    return DissipationCheck(orders=orders, feasible_c=tuple(constants), max_defect=max_defect)


def check_gronwall(energy: EnergySeries, b: float, which: str = "weighted") -> float:
    """Least C >= 0 with energy(t) <= e^(C t) (energy(0) + b) - b at all samples.

    Bisection to absolute tolerance 1e-6; raises :class:`Infeasible` when no
    C <= 1000 works (which signals a solver defect, not a modelling fact).
    """
    values = energy.m1 if which == "m1" else energy.m_weighted
    times = energy.times
    base = energy.initial + b
    slack = 1e-12 * max(base, 1.0)

    def feasible(c: float) -> bool:
        with np.errstate(over="ignore"):
            envelope = np.exp(c * times) * base
        return bool(np.all(values <= envelope - b + slack))

    if feasible(0.0):
        return 0.0
    lo, hi = 0.0, 1000.0
    if not feasible(hi):
        raise Infeasible("no envelope constant below 1000 bounds the energy series")
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class ContinuityCheck:
    """Shift defects ||u(t+s) - u(t)|| and their ratios under shift halving."""

    t: float
    shifts: Tuple[float, ...]
    l2_defects: Tuple[float, ...]
    h1_defects: Tuple[float, ...]
    l2_ratios: Tuple[float, ...]
    h1_ratios: Tuple[float, ...]


def check_continuity(
    problem: ProblemSpec,
    t: float,
    shifts: Sequence[float],
    method: Method = Method.EXACT_EXPONENTIAL,
    safety: float = 0.5,
) -> ContinuityCheck:
    """Defects of u(t+s) - u(t) for each shift; each halving of s should
    roughly halve both defects once s resolves the local time scale."""
    shifts = tuple(sorted((float(s) for s in shifts), reverse=True))
    if shifts[-1] <= 0:
        raise ValueError("shifts must be positive")
    if t <= 0 or t + shifts[0] > problem.horizon:
        raise ValueError("t and t + max(shift) must lie inside (0, horizon]")
    times = sorted({t} | {t + s for s in shifts})
    run = solve(problem, times, method=method, safety=safety)
    lookup = dict(zip(run.sample_times, run.states))
    base = lookup[t]
    l2, h1 = [], []
    for s in shifts:
        diff = lookup[t + s] - base
        l2.append(math.sqrt(sobolev_norm(diff, 0)))
        h1.append(math.sqrt(sobolev_norm(diff, 1)))
    l2_ratios = tuple(l2[i + 1] / l2[i] for i in range(len(l2) - 1))
    h1_ratios = tuple(h1[i + 1] / h1[i] for i in range(len(h1) - 1))
    return ContinuityCheck(
        t=t,
        shifts=shifts,
        l2_defects=tuple(l2),
        h1_defects=tuple(h1),
        l2_ratios=l2_ratios,
        h1_ratios=h1_ratios,
    )


@dataclass(frozen=True)
class StabilityCheck:
    """L2 distance of a perturbed twin, against the exponential envelope
    (and plain contraction for constant coefficients)."""

    times: Tuple[float, ...]
    defects: Tuple[float, ...]
    initial_defect: float
    envelope_c: float
    envelope_ok: bool
    contractive: bool


def check_uniqueness_stability(
    problem: ProblemSpec,
    perturbed_initial: ScalarField,
    sample_times: Sequence[float],
    method: Method = Method.SPLIT_EXPONENTIAL,
    safety: float = 0.5,
    envelope_c: float = 0.0,
) -> StabilityCheck:
    """Run the problem and its perturbed twin; the difference solves the
    same flow with zero forcing, so its L2 norm must stay under
    ||du0|| * e^(C t) (and under ||du0|| itself for any admissible C,
    since the difference flow is dissipative)."""
    twin = ProblemSpec(
        grid=problem.grid,
        diffusion=problem.diffusion,
        forcing=problem.forcing,
        initial=perturbed_initial,
        horizon=problem.horizon,
        label=problem.label + "+perturbed",
    )
    base = solve(problem, sample_times, method=method, safety=safety)
    other = solve(twin, sample_times, method=method, safety=safety)
    d0 = math.sqrt(sobolev_norm(perturbed_initial - problem.initial, 0))
    defects = []
    for a, b_state in zip(base.states, other.states):
        defects.append(math.sqrt(sobolev_norm(b_state - a, 0)))
    times = np.asarray(base.sample_times)
    envelope = d0 * np.exp(envelope_c * times) + 1e-12 * (d0 + 1.0)
    envelope_ok = bool(np.all(np.asarray(defects) <= envelope))
    tol = 1e-12 * (d0 + 1.0)
    seq = [d0] + defects
    contractive = all(seq[i + 1] <= seq[i] + tol for i in range(len(seq) - 1))
    return StabilityCheck(
        times=tuple(times.tolist()),
        defects=tuple(defects),
        initial_defect=d0,
        envelope_c=envelope_c,
        envelope_ok=envelope_ok,
        contractive=contractive,
    )


def residual_weak_form(trajectory: Trajectory, test_modes: int) -> float:
    """Largest integrated-equation residual against leading test modes.

    For each retained mode v, evaluates <du/dt, v> + <D grad u, grad v>
    - <f, v> at interior sample times (centered time stencil), normalised
    by ||u0||_2 + ||f||_2.  A genuine solution sampled densely in time
    drives this to the stencil error; an inconsistent state sequence
    leaves it order one.
    """
    if len(trajectory.states) < 3:
        raise WindowTooSparse("weak-form residual needs at least 3 samples")
    problem = trajectory.problem
    g = problem.grid
    basis = TrigBasis.leading(g, test_modes)
    coords = g.coords()
    w = basis.values_on(coords)
    dw = basis.gradients_on(coords)
    cell = g.cell_volume

    times = np.asarray(trajectory.sample_times)
    values = np.stack([state.values for state in trajectory.states])
    mid, dudt = _derivative_stencil(times, np.moveaxis(values, 0, -1))
    dudt = np.moveaxis(dudt, -1, 0)

    f_vals = problem.forcing.values
    f_against = np.tensordot(w, f_vals, axes=(tuple(range(1, 1 + g.n)), tuple(range(g.n)))) * cell

    norm0 = math.sqrt(sobolev_norm(problem.initial, 0)) + math.sqrt(sobolev_norm(problem.forcing, 0))
    norm0 = max(norm0, 1e-300)
    worst = 0.0
    for j, t in enumerate(mid):
        state = trajectory.states[j + 1]
        grads = gridmod.gradient_values(g, state.spectral)
        flux = np.einsum("...ab,b...->a...", problem.diffusion.entries, grads)
        time_term = np.tensordot(w, dudt[j], axes=(tuple(range(1, 1 + g.n)), tuple(range(g.n)))) * cell
        space_axes = tuple(range(1, 1 + g.n))
        flux_term = (
            np.tensordot(dw, flux, axes=(tuple([1] + [a + 1 for a in space_axes]), tuple([0] + list(space_axes))))
            * cell
        )
        residual = time_term + flux_term - f_against
        worst = max(worst, float(np.max(np.abs(residual))) / norm0)
    return worst


@dataclass(frozen=True)
class DecayProfile:
    """Shell-averaged spectral amplitude |coefficient| per integer shell."""

    shells: np.ndarray
    amplitude: np.ndarray


def spectral_decay_profile(state: ScalarField) -> DecayProfile:
    g = state.grid
    radius = np.rint(g.mode_magnitude).astype(int).ravel()
    amp = np.abs(state.spectral).ravel()
    top = radius.max()
    sums = np.bincount(radius, weights=amp, minlength=top + 1)
    counts = np.bincount(radius, minlength=top + 1)
    shells = np.arange(top + 1)
    return DecayProfile(shells=shells, amplitude=sums / np.maximum(counts, 1))


def profile_dominates(early: DecayProfile, late: DecayProfile, floor: float = 1e-14) -> Tuple[bool, int]:
    """Whether the later-time profile sits below the earlier one for every
    shell beyond the first crossover; returns (ok, crossover shell)."""
    n = min(early.amplitude.size, late.amplitude.size)
    a, b = early.amplitude[:n], late.amplitude[:n]
    scale = max(float(np.max(a)), floor)
    crossover = 0
    for i in range(n):
        if b[i] < a[i]:
            crossover = i
            break
    tail_ok = bool(np.all(b[crossover:] <= a[crossover:] + floor * scale))
    return tail_ok, crossover
