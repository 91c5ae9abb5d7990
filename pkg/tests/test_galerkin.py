"""Dense Galerkin oracle: basis, assembly, dense solve, closed-form heat."""

import math

import numpy as np
import pytest

from parasmooth.errors import MethodMismatch, TooManyModes
from parasmooth.evolve import Method, solve
from parasmooth.galerkin import (
    BasisFunction,
    GalerkinSystem,
    TrigBasis,
    assemble_system,
    heat_exact,
    project,
    reconstruct,
    solve_dense,
)
from parasmooth.grid import GridSpec, ScalarField, sobolev_norm
from parasmooth.problems import ProblemSpec, isotropic, sine_1d


def sine_problem(points=256, horizon=0.1, forcing=None):
    g = GridSpec(n=1, points=points)
    u0 = ScalarField.from_values(g, np.sin(g.axis_coords) + 0.3 * np.cos(2 * g.axis_coords))
    if forcing is None:
        forcing = ScalarField.zeros(g)
    return ProblemSpec(grid=g, diffusion=sine_1d(g, 1.5, 1.0), forcing=forcing, initial=u0, horizon=horizon)


def heat_problem(points=64, scale=1.0, horizon=1.0, forcing=None, u0=None):
    g = GridSpec(n=1, points=points)
    if u0 is None:
        u0 = ScalarField.from_values(g, np.sin(g.axis_coords))
    if forcing is None:
        forcing = ScalarField.zeros(g)
    return ProblemSpec(grid=g, diffusion=isotropic(g, scale), forcing=forcing, initial=u0, horizon=horizon)


class TestBasis:
    def test_leading_order_1d(self):
        basis = TrigBasis.leading(GridSpec(n=1, points=64), 5)
        kinds = [(fn.freq, fn.kind) for fn in basis.functions]
        assert kinds == [((0,), "const"), ((1,), "cos"), ((1,), "sin"), ((2,), "cos"), ((2,), "sin")]

    def test_orthonormality_by_quadrature(self):
        g = GridSpec(n=1, points=64)
        basis = TrigBasis.leading(g, 9)
        w = basis.values_on(g.coords())
        gram = np.tensordot(w, w, axes=(1, 1)) * g.cell_volume
        assert np.max(np.abs(gram - np.eye(9))) < 1e-12

    def test_orthonormality_2d(self):
        g = GridSpec(n=2, points=16)
        basis = TrigBasis.leading(g, 9)
        w = basis.values_on(g.coords())
        gram = np.tensordot(w, w, axes=((1, 2), (1, 2))) * g.cell_volume
        assert np.max(np.abs(gram - np.eye(9))) < 1e-12

    def test_too_many_modes(self):
        with pytest.raises(TooManyModes):
            TrigBasis.leading(GridSpec(n=1, points=64), 5000)
        with pytest.raises(TooManyModes):
            TrigBasis.leading(GridSpec(n=1, points=8), 9)  # needs frequency 4 = Nyquist

    def test_project_reconstruct_round_trip(self):
        g = GridSpec(n=1, points=64)
        basis = TrigBasis.leading(g, 7)
        coeffs = np.arange(1.0, 8.0)
        field = reconstruct(basis, coeffs, g)
        assert np.max(np.abs(project(basis, field) - coeffs)) < 1e-12


class TestAssembly:
    def test_identity_diffusion_diagonal(self):
        # basis (constant, cos, sin): stiffness is diag(0, 1, 1)
        system = assemble_system(heat_problem(), 3)
        assert np.max(np.abs(system.A - np.diag([0.0, 1.0, 1.0]))) < 1e-12

    def test_zero_forcing_zero_load(self):
        system = assemble_system(heat_problem(), 5)
        assert np.max(np.abs(system.F)) < 1e-13

    def test_initial_coefficients_unit_vector(self):
        g = GridSpec(n=1, points=64)
        basis = TrigBasis.leading(g, 5)
        w2 = basis.values_on(g.coords())[2]  # sin mode, frequency 1
        problem = heat_problem(u0=ScalarField.from_values(g, w2))
        system = assemble_system(problem, 5)
        want = np.zeros(5)
        want[2] = 1.0
        assert np.max(np.abs(system.c0 - want)) < 1e-12

    def test_symmetry(self):
        system = assemble_system(sine_problem(points=64), 9)
        scale = np.max(np.abs(system.A))
        assert np.max(np.abs(system.A - system.A.T)) <= 1e-12 * scale

    def test_quadratic_form_ellipticity(self):
        # c^T A c >= theta * c^T G c with G the gradient Gram matrix
        problem = sine_problem(points=64)
        system = assemble_system(problem, 9)
        gram = assemble_system(heat_problem(points=64), 9).A  # identity diffusion
        rng = np.random.default_rng(12)
        for _ in range(20):
            c = rng.standard_normal(9)
            lhs = c @ system.A @ c
            rhs = problem.diffusion.theta * (c @ gram @ c)
            assert lhs >= rhs - 1e-10 * max(abs(lhs), 1.0)

    def test_positive_semidefinite(self):
        system = assemble_system(sine_problem(points=64), 9)
        eigenvalues = np.linalg.eigvalsh(system.A)
        assert eigenvalues.min() >= -1e-12 * max(eigenvalues.max(), 1.0)

    def test_quadrature_grid_refined(self):
        system = assemble_system(heat_problem(points=64), 33)
        assert system.quadrature_points >= 2 * 2 * 16  # twice the highest frequency band


class TestSolveDense:
    def _scalar_system(self, a, f, c0):
        basis = TrigBasis(1, 2 * np.pi, [BasisFunction((0,), "const")])
        return GalerkinSystem(basis, np.array([[a]]), np.array([f]), np.array([c0]), theta=1.0, quadrature_points=8)

    def test_scalar_exponential(self):
        out = solve_dense(self._scalar_system(1.0, 0.0, 1.0), [0.5])
        assert out[0, 0] == pytest.approx(math.exp(-0.5), rel=1e-14)

    def test_fixed_point(self):
        # F = A c*: the solution stays at c* for all times
        rng = np.random.default_rng(3)
        m = 4
        root = rng.standard_normal((m, m))
        a = root @ root.T + np.eye(m)
        c_star = rng.standard_normal(m)
        basis = TrigBasis.leading(GridSpec(n=1, points=64), m)
        system = GalerkinSystem(basis, a, a @ c_star, c_star.copy(), theta=1.0, quadrature_points=8)
        out = solve_dense(system, [0.1, 1.0, 5.0])
        for row in out:
            assert np.max(np.abs(row - c_star)) < 1e-10

    def test_zero_eigenvalue_linear_growth(self):
        out = solve_dense(self._scalar_system(0.0, 0.25, 2.0), [4.0])
        assert out[0, 0] == pytest.approx(3.0, rel=1e-14)


class TestHeatExact:
    def test_identity_at_time_zero(self):
        problem = heat_problem()
        state = heat_exact(problem, 0.0)
        assert np.max(np.abs(state.values - problem.initial.values)) < 1e-13

    def test_single_mode_factor(self):
        # frequency 2, unit diffusion, t = 0.25: amplitude factor e^{-1}
        g = GridSpec(n=1, points=64)
        problem = heat_problem(u0=ScalarField.from_values(g, np.sin(2 * g.axis_coords)))
        state = heat_exact(problem, 0.25)
        ratio = math.sqrt(sobolev_norm(state, 0) / sobolev_norm(problem.initial, 0))
        assert ratio == pytest.approx(math.exp(-1.0), rel=1e-13)

    def test_mean_conserved_without_forcing(self):
        g = GridSpec(n=1, points=64)
        u0 = ScalarField.from_values(g, 1.5 + np.sin(g.axis_coords))
        problem = heat_problem(u0=u0)
        for t in (0.1, 1.0):
            assert heat_exact(problem, t).mean == pytest.approx(1.5, rel=1e-14)

    def test_variable_coefficients_rejected(self):
        with pytest.raises(MethodMismatch):
            heat_exact(sine_problem(), 0.05)


class TestOracleEquivalence:
    def test_dense_matches_pseudospectral(self):
        problem = sine_problem(points=256, horizon=0.1)
        trajectory = solve(problem, [0.05, 0.1], method=Method.SPLIT_EXPONENTIAL)
        gaps = []
        for m in (9, 17, 33):
            system = assemble_system(problem, m)
            dense = solve_dense(system, trajectory.sample_times)
            worst = 0.0
            for row, state in zip(dense, trajectory.states):
                worst = max(worst, float(np.linalg.norm(project(system.basis, state) - row)))
            gaps.append(worst)
        assert gaps[2] <= 1e-6
        assert gaps[0] >= gaps[1] >= gaps[2]

    def test_nesting_cauchy_behavior(self):
        # refining the basis shrinks successive dense-solution gaps
        problem = sine_problem(points=256, horizon=0.1)
        t = [0.1]
        coeffs = {}
        for m in (9, 17, 33):
            system = assemble_system(problem, m)
            coeffs[m] = (system.basis, solve_dense(system, t)[0])

        def gap(ma, mb):
            basis_a, ca = coeffs[ma]
            basis_b, cb = coeffs[mb]
            field_a = reconstruct(basis_a, ca, problem.grid)
            field_b = reconstruct(basis_b, cb, problem.grid)
            return math.sqrt(sobolev_norm(field_a - field_b, 0))

        assert gap(17, 33) <= gap(9, 17)

    def test_dense_matches_pseudospectral_2d(self):
        from parasmooth.problems import sine_rank1_2d

        g = GridSpec(n=2, points=16)
        xx, yy = g.coords()
        u0 = ScalarField.from_values(g, np.sin(xx) + 0.5 * np.cos(yy))
        problem = ProblemSpec(
            grid=g,
            diffusion=sine_rank1_2d(g, base=1.5, amplitude=0.5, rank1=0.5),
            forcing=ScalarField.zeros(g),
            initial=u0,
            horizon=0.1,
        )
        trajectory = solve(problem, [0.1], method=Method.SPLIT_EXPONENTIAL)
        gaps = []
        for m in (9, 25, 49, 81):  # complete frequency rings
            system = assemble_system(problem, m)
            dense = solve_dense(system, trajectory.sample_times)
            gaps.append(float(np.linalg.norm(project(system.basis, trajectory.states[0]) - dense[0])))
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[-1] <= 1e-5

    def test_a_priori_bound_uniform_in_m(self):
        # both weighted-energy and integrated first-order norms stay within a
        # common envelope across basis sizes
        problem = sine_problem(points=256, horizon=0.1)
        times = np.logspace(-2, -1, 8)
        theta = problem.diffusion.theta
        data = sobolev_norm(problem.initial, 0)
        sup_ratios, integral_ratios = [], []
        for m in (9, 17, 33):
            system = assemble_system(problem, m)
            dense = solve_dense(system, times.tolist())
            m1_values, h1_values = [], []
            for t, row in zip(times, dense):
                field = reconstruct(system.basis, row, problem.grid)
                n0 = sobolev_norm(field, 0)
                n1 = sobolev_norm(field, 1)
                m1_values.append(n0 + 0.5 * theta * t * n1)
                h1_values.append(n0 + n1)
            sup_ratios.append(max(m1_values) / data)
            integral_ratios.append(float(np.trapezoid(h1_values, times)) / data)
        assert max(sup_ratios) <= 1.25 * min(sup_ratios)
        assert max(integral_ratios) <= 1.25 * min(integral_ratios)
