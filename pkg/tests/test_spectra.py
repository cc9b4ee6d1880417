import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apnorm import (GridSpec, Spectrum, analyze, annulus_mass, builtin, lp_sum,
                    sample_phase, synthesize)
from apnorm.oracles import bessel_coefficients


def spectrum_of(phase, lam, n, m=1):
    return analyze(sample_phase(phase, lam, GridSpec(m, n)))


class TestGridSpec:
    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            GridSpec(1, 48)

    def test_rejects_small_grid(self):
        with pytest.raises(ValueError):
            GridSpec(1, 2)

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            GridSpec(0, 64)

    def test_nodes(self):
        grid = GridSpec(1, 8)
        np.testing.assert_allclose(grid.axis_nodes(), 2 * np.pi * np.arange(8) / 8)
        assert grid.frequencies().tolist() == [-4, -3, -2, -1, 0, 1, 2, 3]


class TestSamplePhase:
    def test_constant_phase(self):
        field = sample_phase(builtin("constant", 1, c=1.3), 1.0, GridSpec(1, 64))
        np.testing.assert_allclose(field.values, np.exp(1.3j), atol=1e-14)

    def test_linear_phase_is_pure_harmonic(self):
        grid = GridSpec(1, 64)
        field = sample_phase(builtin("linear", 1, k=3), 1.0, grid)
        np.testing.assert_allclose(field.values, np.exp(3j * grid.axis_nodes()), atol=1e-13)

    def test_unimodular(self):
        field = sample_phase(builtin("cosine", 1), 5.0, GridSpec(1, 256))
        assert field.max_unimodularity_defect() < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            sample_phase(builtin("cosine", 1), 1.0, GridSpec(2, 64))


class TestAnalyze:
    def test_constant_field_is_delta_at_zero(self):
        spec = spectrum_of(builtin("constant", 1), 1.0, 64)
        assert spec.coefficient((0,)) == pytest.approx(np.exp(0j), abs=1e-14)
        rest = spec.magnitudes().copy()
        rest[32] = 0.0
        assert np.max(rest) < 1e-14

    def test_single_harmonic(self):
        spec = spectrum_of(builtin("linear", 1, k=3), 1.0, 64)
        assert spec.coefficient((3,)) == pytest.approx(1.0, abs=1e-13)

    def test_cosine_phase_matches_bessel_expansion(self):
        # exp(i 5 cos t) = sum_k i^k J_k(5) e^{ikt}
        spec = spectrum_of(builtin("cosine", 1), 5.0, 256)
        bessel = bessel_coefficients(5.0, 60)
        for k in range(-40, 41):
            expected = 1j ** k * bessel[abs(k)] * (-1.0 if k < 0 and k % 2 else 1.0)
            assert spec.coefficient((k,)) == pytest.approx(expected, abs=1e-10)

    def test_parseval_every_grid_size(self):
        phase = builtin("cosine", 1)
        for n in (64, 128, 512):
            assert lp_sum(spectrum_of(phase, 7.0, n), 2.0) == pytest.approx(1.0, abs=1e-9)
        phase2 = builtin("cosine_sum", 2)
        assert lp_sum(spectrum_of(phase2, 7.0, 64, m=2), 2.0) == pytest.approx(1.0, abs=1e-9)


class TestSynthesize:
    def test_delta_spectrum_gives_constant_field(self):
        grid = GridSpec(1, 32)
        coeffs = np.zeros(32, dtype=complex)
        coeffs[16] = 1.0  # k = 0
        field = synthesize(Spectrum(grid, coeffs))
        np.testing.assert_allclose(field.values, 1.0, atol=1e-13)

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_round_trip_identity(self, seed):
        rng = np.random.default_rng(seed)
        grid = GridSpec(1, 64)
        values = rng.normal(size=64) + 1j * rng.normal(size=64)
        back = synthesize(analyze(__import__("apnorm").Field(grid, values)))
        np.testing.assert_allclose(back.values, values, atol=1e-12)

    def test_synthesize_matches_direct_evaluation(self):
        grid = GridSpec(1, 256)
        field = sample_phase(builtin("cosine", 1), 5.0, grid)
        back = synthesize(analyze(field))
        np.testing.assert_allclose(back.values, field.values, atol=1e-10)


class TestLpSum:
    def test_unimodular_p2_is_one(self):
        spec = spectrum_of(builtin("cosine", 1), 9.0, 256)
        assert lp_sum(spec, 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_single_harmonic_any_p(self):
        spec = spectrum_of(builtin("linear", 1, k=2), 1.0, 64)
        for p in (1.0, 1.4, 2.0):
            assert lp_sum(spec, p) == pytest.approx(1.0, abs=1e-12)

    def test_cosine_phase_l1_matches_bessel_sum(self):
        spec = spectrum_of(builtin("cosine", 1), 5.0, 256)
        bessel = np.abs(bessel_coefficients(5.0, 80))
        expected = bessel[0] + 2.0 * np.sum(bessel[1:])
        assert lp_sum(spec, 1.0) == pytest.approx(expected, rel=1e-8)

    def test_p_out_of_range(self):
        spec = spectrum_of(builtin("cosine", 1), 1.0, 64)
        for p in (0.5, 2.5):
            with pytest.raises(ValueError, match="p must lie"):
                lp_sum(spec, p)

    @given(st.integers(0, 2 ** 32 - 1),
           st.floats(1.0, 2.0), st.floats(1.0, 2.0))
    @settings(max_examples=50, deadline=None)
    def test_monotone_nonincreasing_in_p(self, seed, p1, p2):
        rng = np.random.default_rng(seed)
        grid = GridSpec(1, 64)
        coeffs = rng.normal(size=64) + 1j * rng.normal(size=64)
        coeffs /= np.max(np.abs(coeffs))  # max |fhat| <= 1
        spec = Spectrum(grid, coeffs)
        lo, hi = sorted((p1, p2))
        assert lp_sum(spec, lo) >= lp_sum(spec, hi) - 1e-12


class TestAnnulusMass:
    def test_mass_of_outer_harmonic(self):
        grid = GridSpec(1, 64)
        coeffs = np.zeros(64, dtype=complex)
        coeffs[32 + 20] = 0.5  # k = 20 > n/4 = 16
        coeffs[32 + 3] = 1.0
        spec = Spectrum(grid, coeffs)
        assert annulus_mass(spec, 1.0) == pytest.approx(0.5, abs=1e-15)
        assert annulus_mass(spec, 2.0) == pytest.approx(0.25, abs=1e-15)

    def test_resolved_phase_has_negligible_annulus(self):
        spec = spectrum_of(builtin("cosine", 1), 5.0, 256)
        assert annulus_mass(spec, 1.0) < 1e-10 * lp_sum(spec, 1.0)

    def test_m2_mask_covers_both_axes(self):
        grid = GridSpec(2, 16)
        coeffs = np.zeros((16, 16), dtype=complex)
        coeffs[8 + 6, 8] = 1.0  # (6, 0): |k|_inf = 6 > 4
        spec = Spectrum(grid, coeffs)
        assert annulus_mass(spec, 1.0) == pytest.approx(1.0)
