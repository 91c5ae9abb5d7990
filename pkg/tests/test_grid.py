"""Grid, transform, derivative, and norm tests.

Derived expectations are either closed forms evaluated on the grid or
quadrature oracles computed directly in the test.
"""

import math

import numpy as np
import pytest

from parasmooth.errors import GridMismatch
from parasmooth.grid import (
    GridSpec,
    ScalarField,
    fsum,
    inner_product,
    quadrature,
    resample_values,
    sobolev_norm,
    spectral_derivative,
    transform_backward,
    transform_forward,
)


def sine_field(grid, freq=1, phase="sin"):
    x = grid.axis_coords
    wave = np.sin(freq * x) if phase == "sin" else np.cos(freq * x)
    return ScalarField.from_values(grid, wave)


def random_field(grid, seed):
    rng = np.random.default_rng(seed)
    return ScalarField.from_values(grid, rng.standard_normal(grid.shape))


class TestGridSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec(n=0, points=16)
        with pytest.raises(ValueError):
            GridSpec(n=4, points=16)
        with pytest.raises(ValueError):
            GridSpec(n=1, points=15)
        with pytest.raises(ValueError):
            GridSpec(n=1, points=4)
        with pytest.raises(ValueError):
            GridSpec(n=1, points=16, length=0.0)

    def test_mode_lattice(self):
        g = GridSpec(n=1, points=8)
        assert list(g.modes) == [0, 1, 2, 3, -4, -3, -2, -1]
        assert g.max_wavenumber == pytest.approx(4.0)

    def test_scaled_wavenumbers(self):
        g = GridSpec(n=1, points=16, length=4 * np.pi)
        k = g.deriv_wavenumber(0).ravel()
        assert k[1] == pytest.approx(0.5)
        assert k[8] == 0.0  # Nyquist zeroed for derivatives

    def test_max_wavenumber_multidim(self):
        g = GridSpec(n=2, points=16)
        assert g.max_wavenumber == pytest.approx(8.0 * math.sqrt(2.0))


class TestTransforms:
    def test_constant_field_single_mode(self):
        g = GridSpec(n=1, points=32)
        field = ScalarField.from_values(g, np.full(g.shape, 2.5))
        spec = transform_forward(field).spectral
        assert spec[0] == pytest.approx(2.5)
        assert np.max(np.abs(spec[1:])) < 1e-14

    def test_sine_two_modes(self):
        g = GridSpec(n=1, points=32)
        spec = sine_field(g).spectral
        nonzero = np.flatnonzero(np.abs(spec) > 1e-13)
        assert sorted(nonzero.tolist()) == [1, 31]  # modes +1 and -1
        assert spec[1] == pytest.approx(-0.5j)

    @pytest.mark.parametrize("n,points", [(1, 64), (2, 16), (3, 8)])
    def test_round_trip(self, n, points):
        g = GridSpec(n=n, points=points)
        field = random_field(g, seed=17 * n)
        back = transform_backward(ScalarField.from_spectral(g, field.spectral.copy()))
        scale = np.max(np.abs(field.values))
        assert np.max(np.abs(back.values - field.values)) <= 1e-12 * scale

    def test_non_hermitian_spectral_rejected(self):
        g = GridSpec(n=1, points=16)
        spec = np.zeros(16, dtype=complex)
        spec[1] = 1.0  # no conjugate partner at -1
        with pytest.raises(ValueError, match="Hermitian"):
            ScalarField.from_spectral(g, spec).values


class TestDerivative:
    def test_constant_derivative_zero(self):
        g = GridSpec(n=1, points=32)
        field = ScalarField.from_values(g, np.full(g.shape, 3.0))
        assert np.max(np.abs(spectral_derivative(field, 0).values)) < 1e-13

    def test_sine_to_cosine(self):
        g = GridSpec(n=1, points=64)
        du = spectral_derivative(sine_field(g), 0)
        assert np.max(np.abs(du.values - np.cos(g.axis_coords))) <= 1e-12

    def test_second_derivative(self):
        g = GridSpec(n=1, points=64)
        ddu = spectral_derivative(spectral_derivative(sine_field(g), 0), 0)
        assert np.max(np.abs(ddu.values + np.sin(g.axis_coords))) <= 1e-12

    def test_length_scaling(self):
        g = GridSpec(n=1, points=64, length=4 * np.pi)
        x = g.axis_coords
        field = ScalarField.from_values(g, np.sin(x / 2.0))
        du = spectral_derivative(field, 0)
        assert np.max(np.abs(du.values - 0.5 * np.cos(x / 2.0))) <= 1e-12

    def test_invalid_axis(self):
        g = GridSpec(n=1, points=16)
        with pytest.raises(ValueError):
            spectral_derivative(sine_field(g), 1)

    def test_hermitian_preserved(self):
        g = GridSpec(n=2, points=16)
        field = random_field(g, seed=5)
        spec = spectral_derivative(field, 1).spectral.ravel()
        conj = g.conjugate_index_map
        assert np.max(np.abs(spec - np.conj(spec[conj]))) < 1e-12


class TestSobolevNorm:
    def test_constant_gradient_zero(self):
        g = GridSpec(n=1, points=32)
        field = ScalarField.from_values(g, np.full(g.shape, 4.0))
        assert sobolev_norm(field, 1) == 0.0

    def test_sine_closed_form(self):
        # integral of sin^2 over [0, 2*pi) is pi, for both the function and
        # its derivative inside the k = 1 seminorm
        g = GridSpec(n=1, points=64)
        field = sine_field(g)
        assert sobolev_norm(field, 0) == pytest.approx(math.pi, rel=1e-13)
        assert sobolev_norm(field, 1) == pytest.approx(math.pi, rel=1e-13)

    def test_multi_index_enumeration_2d(self):
        # single mode at (1, 2): order-2 multiplier enumerates (2,0), (1,1),
        # (0,2) once each giving 1 + 4 + 16 = 21, not |freq|^4 = 25
        g = GridSpec(n=2, points=16)
        spec = np.zeros(g.shape, dtype=complex)
        spec[1, 2] = 0.5
        spec[-1, -2] = 0.5
        field = ScalarField.from_spectral(g, spec)
        assert sobolev_norm(field, 2) / sobolev_norm(field, 0) == pytest.approx(21.0, rel=1e-12)

    def test_order_bounds(self):
        g = GridSpec(n=1, points=16)
        with pytest.raises(ValueError):
            sobolev_norm(sine_field(g), -1)
        with pytest.raises(ValueError):
            sobolev_norm(sine_field(g), 9)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_parseval(self, seed):
        g = GridSpec(n=1, points=128)
        field = random_field(g, seed)
        spectral_side = sobolev_norm(field, 0)
        quad_side = quadrature(ScalarField.from_values(g, field.values**2))
        assert abs(spectral_side - quad_side) <= 1e-10 * spectral_side

    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_norm_consistency_1d(self, k):
        g = GridSpec(n=1, points=64)
        field = random_field(g, seed=3)
        direct = sobolev_norm(field, k + 1)
        via_deriv = sobolev_norm(spectral_derivative(field, 0), k)
        assert via_deriv == pytest.approx(direct, rel=1e-10)

    def test_norm_consistency_first_order_2d(self):
        # order 0 -> 1 is the only cross-dimensional case where the axis sum
        # matches the direct enumeration (higher orders count mixed
        # derivatives once, the axis sum counts them per axis)
        g = GridSpec(n=2, points=16)
        field = random_field(g, seed=4)
        direct = sobolev_norm(field, 1)
        via = sum(sobolev_norm(spectral_derivative(field, axis), 0) for axis in range(2))
        assert via == pytest.approx(direct, rel=1e-10)


class TestInnerProduct:
    def test_orthogonality(self):
        g = GridSpec(n=1, points=64)
        assert abs(inner_product(sine_field(g), sine_field(g, phase="cos"))) < 1e-13

    def test_sin_sin(self):
        g = GridSpec(n=1, points=64)
        assert inner_product(sine_field(g), sine_field(g)) == pytest.approx(math.pi, rel=1e-13)

    def test_zero_element(self):
        g = GridSpec(n=1, points=64)
        assert inner_product(ScalarField.zeros(g), random_field(g, 9)) == 0.0

    def test_symmetry_and_l2(self):
        g = GridSpec(n=1, points=64)
        a, b = random_field(g, 10), random_field(g, 11)
        assert inner_product(a, b) == pytest.approx(inner_product(b, a), rel=1e-14)
        assert inner_product(a, a) == pytest.approx(sobolev_norm(a, 0), rel=1e-12)

    def test_grid_mismatch(self):
        a = random_field(GridSpec(n=1, points=32), 1)
        b = random_field(GridSpec(n=1, points=64), 1)
        with pytest.raises(GridMismatch):
            inner_product(a, b)


class TestHelpers:
    def test_fsum_matches_exact(self):
        values = np.array([1e16, 1.0, -1e16, 1.0])
        assert fsum(values) == 2.0

    def test_resample_exact_for_band_limited(self):
        g = GridSpec(n=1, points=16)
        x = g.axis_coords
        vals = np.sin(x) + 0.5 * np.cos(3 * x)
        fine = resample_values(g, vals, 64)
        xf = np.arange(64) * (2 * np.pi / 64)
        assert np.max(np.abs(fine - (np.sin(xf) + 0.5 * np.cos(3 * xf)))) < 1e-13

    def test_resample_2d(self):
        g = GridSpec(n=2, points=16)
        xx, yy = g.coords()
        vals = np.sin(xx) * np.cos(2 * yy)
        fine = resample_values(g, vals, 32)
        gf = GridSpec(n=2, points=32)
        xf, yf = gf.coords()
        assert np.max(np.abs(fine - np.sin(xf) * np.cos(2 * yf))) < 1e-13

    def test_field_arithmetic(self):
        g = GridSpec(n=1, points=32)
        a, b = sine_field(g), sine_field(g, phase="cos")
        combo = 2.0 * a - b + a
        want = 3 * np.sin(g.axis_coords) - np.cos(g.axis_coords)
        assert np.max(np.abs(combo.values - want)) < 1e-13
