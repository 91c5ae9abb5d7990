"""Solver tests: operator application, step control, and the three methods."""

import math

import numpy as np
import pytest

from parasmooth.errors import GridMismatch, MethodMismatch, UnstableStep
from parasmooth.evolve import (
    Method,
    _RKStepper,
    _solve_stepped,
    apply_operator,
    cfl_step_size,
    mass_balance,
    solve,
)
from parasmooth.grid import GridSpec, ScalarField, sobolev_norm
from parasmooth.problems import ProblemSpec, isotropic, sine_1d


def heat_problem(points=64, scale=1.0, horizon=1.0, u0=None, forcing=None, n=1):
    g = GridSpec(n=n, points=points)
    if u0 is None:
        u0 = ScalarField.from_values(g, np.sin(g.coords()[0]))
    if forcing is None:
        forcing = ScalarField.zeros(g)
    return ProblemSpec(grid=g, diffusion=isotropic(g, scale), forcing=forcing, initial=u0, horizon=horizon)


def sine_problem(points=64, horizon=0.1, base=1.5, amplitude=1.0):
    g = GridSpec(n=1, points=points)
    u0 = ScalarField.from_values(g, np.sin(g.axis_coords))
    return ProblemSpec(
        grid=g, diffusion=sine_1d(g, base, amplitude), forcing=ScalarField.zeros(g), initial=u0, horizon=horizon
    )


def rel_l2(a, b):
    return math.sqrt(sobolev_norm(a - b, 0)) / max(math.sqrt(sobolev_norm(b, 0)), 1e-300)


class TestApplyOperator:
    def test_constant_in_kernel(self):
        g = GridSpec(n=1, points=32)
        out = apply_operator(isotropic(g), ScalarField.from_values(g, np.full(g.shape, 5.0)))
        assert np.max(np.abs(out.values)) < 1e-13

    def test_identity_laplacian(self):
        g = GridSpec(n=1, points=64)
        x = g.axis_coords
        out = apply_operator(isotropic(g), ScalarField.from_values(g, np.sin(x)))
        assert np.max(np.abs(out.values + np.sin(x))) < 1e-12

    def test_variable_coefficient_symbolic(self):
        # ((2 + sin x) cos x)' = -2 sin x + cos 2x
        g = GridSpec(n=1, points=64)
        x = g.axis_coords
        d = sine_1d(g, base=2.0, amplitude=1.0)
        out = apply_operator(d, ScalarField.from_values(g, np.sin(x)))
        assert np.max(np.abs(out.values - (-2.0 * np.sin(x) + np.cos(2.0 * x)))) < 1e-12

    def test_anisotropic_2d(self):
        # D = diag(2, 3), u = sin(x) cos(2y): div(D grad u) = -(2 + 12) u
        from parasmooth.problems import diagonal

        g = GridSpec(n=2, points=32)
        xx, yy = g.coords()
        u = ScalarField.from_values(g, np.sin(xx) * np.cos(2 * yy))
        out = apply_operator(diagonal(g, [2.0, 3.0]), u)
        assert np.max(np.abs(out.values + 14.0 * u.values)) < 1e-11

    def test_grid_mismatch(self):
        g, h = GridSpec(n=1, points=32), GridSpec(n=1, points=64)
        with pytest.raises(GridMismatch):
            apply_operator(isotropic(g), ScalarField.zeros(h))


class TestStepSize:
    def test_reference_value(self):
        problem = heat_problem(points=64)
        assert cfl_step_size(problem, 1.0) == pytest.approx(1.0 / 1024.0, rel=1e-14)

    def test_doubling_points_quarters(self):
        a = cfl_step_size(heat_problem(points=64), 1.0)
        b = cfl_step_size(heat_problem(points=128), 1.0)
        assert b == pytest.approx(a / 4.0, rel=1e-14)

    def test_safety_linear(self):
        problem = heat_problem()
        assert cfl_step_size(problem, 0.5) == pytest.approx(cfl_step_size(problem, 1.0) / 2.0, rel=1e-14)

    def test_safety_range(self):
        with pytest.raises(ValueError):
            cfl_step_size(heat_problem(), 0.0)
        with pytest.raises(ValueError):
            cfl_step_size(heat_problem(), 1.5)


class TestSolve:
    def test_zero_problem(self):
        g = GridSpec(n=1, points=32)
        problem = ProblemSpec(
            grid=g, diffusion=isotropic(g), forcing=ScalarField.zeros(g), initial=ScalarField.zeros(g), horizon=1.0
        )
        for method in Method:
            trajectory = solve(problem, [0.5, 1.0], method=method)
            for state in trajectory.states:
                assert np.max(np.abs(state.values)) < 1e-13

    def test_single_mode_decay(self):
        problem = heat_problem()
        trajectory = solve(problem, [0.5], method=Method.EXACT_EXPONENTIAL)
        ratio = math.sqrt(sobolev_norm(trajectory.states[0], 0) / sobolev_norm(problem.initial, 0))
        assert ratio == pytest.approx(math.exp(-0.5), rel=1e-12)

    def test_relaxation_to_steady_state(self):
        g = GridSpec(n=1, points=64)
        x = g.axis_coords
        steady = ScalarField.from_values(g, np.sin(x))
        problem = heat_problem(u0=ScalarField.zeros(g), forcing=steady, horizon=10.0)
        trajectory = solve(problem, [10.0], method=Method.EXACT_EXPONENTIAL)
        gap = math.sqrt(sobolev_norm(trajectory.states[0] - steady, 0))
        assert gap <= math.exp(-10.0) * math.sqrt(sobolev_norm(steady, 0)) * (1 + 1e-10)

    def test_exact_requires_isotropic(self):
        with pytest.raises(MethodMismatch):
            solve(sine_problem(), [0.05], method=Method.EXACT_EXPONENTIAL)

    def test_sample_time_validation(self):
        problem = heat_problem()
        with pytest.raises(ValueError):
            solve(problem, [])
        with pytest.raises(ValueError):
            solve(problem, [0.0, 0.5])
        with pytest.raises(ValueError):
            solve(problem, [0.5, 0.5])
        with pytest.raises(ValueError):
            solve(problem, [0.5, 2.0])

    def test_split_matches_exact_constant_coefficients(self):
        problem = heat_problem(points=64, horizon=1.0)
        times = np.logspace(-2, 0, 8).tolist()
        split = solve(problem, times, method=Method.SPLIT_EXPONENTIAL)
        exact = solve(problem, times, method=Method.EXACT_EXPONENTIAL)
        for a, b in zip(split.states, exact.states):
            assert rel_l2(a, b) <= 1e-8

    def test_split_matches_reference_rk_variable_coefficients(self):
        problem = sine_problem(points=32)
        times = [0.05, 0.1]
        split = solve(problem, times, method=Method.SPLIT_EXPONENTIAL)
        rk = solve(problem, times, method=Method.REFERENCE_RK)
        for a, b in zip(split.states, rk.states):
            assert rel_l2(a, b) <= 1e-6

    def test_forcing_with_split(self):
        g = GridSpec(n=1, points=64)
        x = g.axis_coords
        steady = ScalarField.from_values(g, np.sin(x))
        problem = heat_problem(u0=ScalarField.zeros(g), forcing=steady, horizon=1.0)
        split = solve(problem, [0.5, 1.0], method=Method.SPLIT_EXPONENTIAL)
        exact = solve(problem, [0.5, 1.0], method=Method.EXACT_EXPONENTIAL)
        for a, b in zip(split.states, exact.states):
            assert rel_l2(a, b) <= 1e-10

    def test_stats_recorded(self):
        problem = sine_problem(points=32)
        trajectory = solve(problem, [0.05, 0.1], method=Method.SPLIT_EXPONENTIAL, safety=0.5)
        assert trajectory.stats.method is Method.SPLIT_EXPONENTIAL
        assert trajectory.stats.steps > 0
        assert trajectory.stats.splitting_theta == pytest.approx(0.5)
        assert trajectory.stats.max_step <= cfl_step_size(problem, 0.5) * (1 + 1e-12)

    def test_max_step_cap(self):
        problem = sine_problem(points=32)
        capped = solve(problem, [0.1], method=Method.SPLIT_EXPONENTIAL, max_step=1e-4)
        assert capped.stats.steps >= 1000

    def test_unstable_step_detected(self):
        # drive the explicit reference stepper far beyond its stability limit
        problem = sine_problem(points=32, horizon=1.0)
        stepper = _RKStepper(problem)
        with pytest.raises(UnstableStep):
            _solve_stepped(problem, np.array([0.5, 1.0]), stepper, cap=0.05)

    def test_dissipation_across_orders(self):
        problem = heat_problem(points=64, horizon=1.0)
        trajectory = solve(problem, np.logspace(-2, 0, 12).tolist(), method=Method.EXACT_EXPONENTIAL)
        for k in range(5):
            series = [sobolev_norm(state, k) for state in trajectory.states]
            for a, b in zip(series, series[1:]):
                assert b <= a * (1 + 1e-12)

    def test_spectral_accuracy_ladder(self):
        # against the restriction of a double-resolution reference at a
        # common step size, each doubling gains at least a factor 100 until
        # the roundoff floor
        def run(points, common_dt):
            g = GridSpec(n=1, points=points)
            problem = ProblemSpec(
                grid=g,
                diffusion=sine_1d(g, 1.5, 1.0),
                forcing=ScalarField.zeros(g),
                initial=ScalarField.from_values(g, np.sin(g.axis_coords)),
                horizon=0.1,
            )
            return solve(problem, [0.1], method=Method.SPLIT_EXPONENTIAL, max_step=common_dt).states[0]

        common_dt = cfl_step_size(sine_problem(points=128), 0.5)
        reference = run(128, common_dt)
        errors = {}
        for points in (16, 32, 64):
            state = run(points, common_dt)
            stride = 128 // points
            restricted = reference.values[::stride]
            errors[points] = math.sqrt(float(np.sum((state.values - restricted) ** 2)) * (2 * np.pi / points))
        assert errors[32] <= max(errors[16] / 100.0, 1e-10)
        assert errors[64] <= max(errors[32] / 100.0, 1e-10)


class TestMassBalance:
    def test_mean_free_forcing(self):
        problem = heat_problem(points=64)
        trajectory = solve(problem, [0.5, 1.0], method=Method.SPLIT_EXPONENTIAL)
        assert mass_balance(trajectory) <= 1e-12 * math.sqrt(sobolev_norm(problem.initial, 0))

    def test_constant_forcing_linear_mean(self):
        g = GridSpec(n=1, points=32)
        problem = ProblemSpec(
            grid=g,
            diffusion=isotropic(g),
            forcing=ScalarField.from_values(g, np.ones(g.shape)),
            initial=ScalarField.zeros(g),
            horizon=1.0,
        )
        trajectory = solve(problem, [0.25, 0.5, 1.0], method=Method.EXACT_EXPONENTIAL)
        for t, state in zip(trajectory.sample_times, trajectory.states):
            assert state.mean == pytest.approx(t, rel=1e-14)
        assert mass_balance(trajectory) < 1e-14

    def test_zero_problem(self):
        g = GridSpec(n=1, points=32)
        problem = ProblemSpec(
            grid=g, diffusion=isotropic(g), forcing=ScalarField.zeros(g), initial=ScalarField.zeros(g), horizon=1.0
        )
        assert mass_balance(solve(problem, [1.0], method=Method.EXACT_EXPONENTIAL)) == 0.0
