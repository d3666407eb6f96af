import numpy as np
import pytest

from holobench.errors import AliasedCarrier, CropOutOfBounds, DcContamination, GridMismatch
from holobench.field import (
    AngularSpectrum,
    ComplexField,
    Grid2D,
    SpatialFrequency,
    crop_recenter,
    fft2,
    ifft2,
    inner_product,
    plane_wave,
)

from conftest import PITCH, random_field_samples


class TestGrid2D:
    def test_valid(self):
        g = Grid2D(64, 32, 20e-6, 10e-6)
        assert g.shape == (32, 64)
        assert g.extent_x == pytest.approx(64 * 20e-6)
        assert g.df_x == pytest.approx(1.0 / (64 * 20e-6))

    @pytest.mark.parametrize("nx,ny", [(7, 64), (64, 7), (63, 64), (64, 63), (0, 64)])
    def test_bad_counts(self, nx, ny):
        with pytest.raises(ValueError):
            Grid2D(nx, ny, 20e-6, 20e-6)

    @pytest.mark.parametrize("px,py", [(0.0, 1e-6), (1e-6, -1e-6), (np.inf, 1e-6)])
    def test_bad_pitch(self, px, py):
        with pytest.raises(ValueError):
            Grid2D(64, 64, px, py)

    def test_coords_center(self, grid64):
        x = grid64.x_coords()
        assert x[32] == 0.0
        assert x[0] == -32 * PITCH

    def test_left_half(self, grid64):
        h = grid64.left_half()
        assert (h.nx, h.ny) == (32, 64)
        with pytest.raises(ValueError):
            Grid2D(18, 64, PITCH, PITCH).left_half()  # halves would be 9 wide


class TestPlaneWave:
    def test_zero_frequency_is_constant(self, grid64):
        f = plane_wave(grid64, 1.0, SpatialFrequency(0.0, 0.0), 0.0)
        assert np.allclose(f.samples, 1.0 + 0.0j, atol=1e-15)

    def test_one_cycle_across_aperture(self, grid64):
        f = plane_wave(grid64, 1.0, SpatialFrequency(1.0 / grid64.extent_x, 0.0))
        # value 1 at the center pixel, -1 half a period (nx/2 pixels) away
        assert f.samples[32, 32] == pytest.approx(1.0)
        assert f.samples[32, 0] == pytest.approx(-1.0)

    def test_constant_magnitude(self, grid64):
        f = plane_wave(grid64, 2.5, SpatialFrequency(3 * grid64.df_x, -5 * grid64.df_y), 0.7)
        assert np.max(np.abs(np.abs(f.samples) - 2.5)) < 1e-12

    def test_integer_carriers_orthogonal(self, grid64):
        f1 = plane_wave(grid64, 1.0, SpatialFrequency(2 * grid64.df_x, 1 * grid64.df_y))
        f2 = plane_wave(grid64, 1.0, SpatialFrequency(5 * grid64.df_x, 1 * grid64.df_y))
        assert abs(inner_product(f1, f2)) < 1e-12

    def test_aliased_carrier_rejected(self, grid64):
        with pytest.raises(AliasedCarrier):
            plane_wave(grid64, 1.0, SpatialFrequency(grid64.nyquist_x, 0.0))


class TestFft:
    def test_constant_to_dc(self, grid64):
        f = plane_wave(grid64, 1.0, SpatialFrequency(0.0, 0.0))
        spec = fft2(f)
        expected = np.sqrt(grid64.nx * grid64.ny)
        assert spec.samples[32, 32] == pytest.approx(expected)
        off = spec.samples.copy()
        off[32, 32] = 0.0
        assert np.max(np.abs(off)) < 1e-10

    @pytest.mark.parametrize("kx,ky", [(1, 0), (0, 1), (5, -3), (-7, 11)])
    def test_shift_theorem(self, grid64, kx, ky):
        f = plane_wave(grid64, 1.0, SpatialFrequency(kx * grid64.df_x, ky * grid64.df_y))
        spec = fft2(f)
        iy, ix = 32 + ky, 32 + kx
        assert abs(spec.samples[iy, ix]) == pytest.approx(np.sqrt(64 * 64))
        off = spec.samples.copy()
        off[iy, ix] = 0.0
        assert np.max(np.abs(off)) < 1e-9

    def test_parseval(self, grid64, rng):
        f = ComplexField(grid64, random_field_samples(rng, grid64.shape))
        spec = fft2(f)
        a = np.sum(np.abs(f.samples) ** 2)
        b = np.sum(np.abs(spec.samples) ** 2)
        assert abs(a - b) / a < 1e-10
        assert f.power == pytest.approx(spec.power, rel=1e-10)

    def test_round_trip(self, grid64, rng):
        f = ComplexField(grid64, random_field_samples(rng, grid64.shape))
        back = ifft2(fft2(f))
        assert np.max(np.abs(back.samples - f.samples)) < 1e-12

    def test_spectrum_round_trip(self, grid64, rng):
        spec = AngularSpectrum(grid64, random_field_samples(rng, grid64.shape))
        back = fft2(ifft2(spec))
        assert np.max(np.abs(back.samples - spec.samples)) < 1e-12

    def test_dc_delta_to_constant(self, grid64):
        samples = np.zeros(grid64.shape, dtype=complex)
        samples[32, 32] = 1.0
        f = ifft2(AngularSpectrum(grid64, samples))
        assert np.allclose(f.samples, f.samples[0, 0])


class TestCropRecenter:
    def test_plane_wave_demodulates_to_constant(self, grid64):
        carrier = SpatialFrequency(9 * grid64.df_x, -6 * grid64.df_y)
        f = plane_wave(grid64, 1.7, carrier, 0.3)
        res = crop_recenter(fft2(f), carrier, 2 * grid64.df_x)
        out = ifft2(res.spectrum)
        # oracle: the same field multiplied by its conjugate carrier
        oracle = f.samples * np.conj(plane_wave(grid64, 1.0, carrier, 0.0).samples)
        assert res.shift_bins == (9, -6)
        assert res.residual == SpatialFrequency(0.0, 0.0)
        assert np.max(np.abs(out.samples - oracle)) < 1e-10
        assert np.max(np.abs(out.samples - 1.7 * np.exp(0.3j))) < 1e-10

    def test_crop_at_dc_of_constant_is_identity(self, grid64):
        f = plane_wave(grid64, 1.0, SpatialFrequency(0.0, 0.0))
        spec = fft2(f)
        with pytest.warns(DcContamination):
            res = crop_recenter(spec, SpatialFrequency(0.0, 0.0), 3 * grid64.df_x)
        assert np.max(np.abs(res.spectrum.samples - spec.samples)) < 1e-12

    def test_empty_region_gives_zero_field(self, grid64):
        f = plane_wave(grid64, 1.0, SpatialFrequency(0.0, 0.0))
        res = crop_recenter(fft2(f), SpatialFrequency(12 * grid64.df_x, 0.0), 1.0 * grid64.df_x)
        assert np.all(res.spectrum.samples == 0.0)
        assert np.all(ifft2(res.spectrum).samples == 0.0)

    def test_out_of_bounds(self, grid64):
        f = plane_wave(grid64, 1.0, SpatialFrequency(0.0, 0.0))
        spec = fft2(f)
        with pytest.raises(CropOutOfBounds):
            crop_recenter(spec, SpatialFrequency(30 * grid64.df_x, 0.0), 5 * grid64.df_x)

    def test_linearity(self, grid64, rng):
        a = AngularSpectrum(grid64, random_field_samples(rng, grid64.shape))
        b = AngularSpectrum(grid64, random_field_samples(rng, grid64.shape))
        center = SpatialFrequency(7 * grid64.df_x, 4 * grid64.df_y)
        radius = 5 * grid64.df_x
        alpha, beta = 0.3 - 1.1j, -2.0 + 0.4j
        combo = AngularSpectrum(grid64, alpha * a.samples + beta * b.samples)
        lhs = crop_recenter(combo, center, radius).spectrum.samples
        rhs = (
            alpha * crop_recenter(a, center, radius).spectrum.samples
            + beta * crop_recenter(b, center, radius).spectrum.samples
        )
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_sub_bin_residual_reported(self, grid64):
        center = SpatialFrequency(5.3 * grid64.df_x, -2.4 * grid64.df_y)
        f = plane_wave(grid64, 1.0, SpatialFrequency(5 * grid64.df_x, -2 * grid64.df_y))
        res = crop_recenter(fft2(f), center, 2 * grid64.df_x)
        assert res.shift_bins == (5, -2)
        assert res.residual.fx == pytest.approx(0.3 * grid64.df_x)
        assert res.residual.fy == pytest.approx(-0.4 * grid64.df_y)


class TestInnerProduct:
    def test_self_product_real_nonneg(self, grid64, rng):
        f = ComplexField(grid64, random_field_samples(rng, grid64.shape))
        v = inner_product(f, f)
        assert v.imag == pytest.approx(0.0, abs=1e-12)
        assert v.real >= 0.0

    def test_conjugate_symmetry(self, grid64, rng):
        a = ComplexField(grid64, random_field_samples(rng, grid64.shape))
        b = ComplexField(grid64, random_field_samples(rng, grid64.shape))
        assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)))

    def test_grid_mismatch(self, grid64):
        other = Grid2D(32, 64, PITCH, PITCH)
        a = plane_wave(grid64, 1.0, SpatialFrequency(0.0, 0.0))
        b = plane_wave(other, 1.0, SpatialFrequency(0.0, 0.0))
        with pytest.raises(GridMismatch):
            inner_product(a, b)

    def test_displaced_gaussian_overlap(self):
        # overlap of two unit-normalized Gaussians displaced by d is
        # exp(-d^2 / (2 w0^2)); cross-check against fine 1-D quadrature
        w0 = 0.4e-3
        d = 0.35e-3
        grid = Grid2D(256, 256, 20e-6, 20e-6)

        def gauss(grid, x0):
            X, Y = grid.meshgrid()
            prof = np.exp(-(((X - x0) ** 2) + Y**2) / w0**2)
            norm = np.sqrt(np.sum(prof**2) * grid.pixel_area)
            return ComplexField(grid, (prof / norm).astype(complex))

        got = inner_product(gauss(grid, d), gauss(grid, 0.0)).real

        xs = np.linspace(-3e-3, 3e-3, 20001)
        g0 = np.exp(-(xs**2) / w0**2)
        gd = np.exp(-((xs - d) ** 2) / w0**2)
        oracle = np.trapezoid(g0 * gd, xs) / np.trapezoid(g0 * g0, xs)

        analytic = np.exp(-(d**2) / (2 * w0**2))
        assert oracle == pytest.approx(analytic, abs=1e-9)
        assert got == pytest.approx(analytic, abs=1e-6)


class TestImmutability:
    def test_samples_read_only(self, grid64):
        f = plane_wave(grid64, 1.0, SpatialFrequency(0.0, 0.0))
        with pytest.raises(ValueError):
            f.samples[0, 0] = 5.0

    def test_nonfinite_rejected(self, grid64):
        bad = np.ones(grid64.shape, dtype=complex)
        bad[3, 3] = np.nan
        with pytest.raises(ValueError):
            ComplexField(grid64, bad)
