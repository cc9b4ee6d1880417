import numpy as np
import pytest

from apnorm import GridSpec, analyze, builtin, gradient_range, modulus_fit, sample_phase
from apnorm.phases import SmoothnessBudget

SMOOTH = ["constant", "linear", "cosine", "cosine_sum"]


def pts1(t):
    return np.asarray(t, dtype=float)[:, None]


class TestBuiltins:
    def test_linear_eval_and_gradient(self):
        phase = builtin("linear", 2, k=(2, 1))
        pts = np.array([[0.5, 1.0], [1.5, 0.25]])
        np.testing.assert_allclose(phase.eval(pts), [2.0, 3.25])
        np.testing.assert_allclose(phase.grad(pts), [[2.0, 1.0], [2.0, 1.0]])

    def test_cosine_sum_gradient(self):
        phase = builtin("cosine_sum", 2)
        pts = np.array([[0.3, 1.1]])
        np.testing.assert_allclose(phase.grad(pts), [[-np.sin(0.3), -np.sin(1.1)]])

    def test_unknown_family(self):
        with pytest.raises(ValueError, match="unknown phase family"):
            builtin("parabola")

    def test_weierstrass_alpha_validation(self):
        for alpha in (0.0, 1.5):
            with pytest.raises(ValueError):
                builtin("weierstrass", 1, alpha=alpha)

    def test_weierstrass_metadata(self):
        phase = builtin("weierstrass", 1, alpha=0.5, depth=12)
        assert phase.budget == SmoothnessBudget(1, 0.5)
        assert phase.max_freq == 4096
        expected_bound = sum(2.0 ** (-0.5 * n) for n in range(1, 13))
        assert phase.gradient_bound == pytest.approx(expected_bound)

    def test_cosine_must_be_1d(self):
        with pytest.raises(ValueError, match="one-dimensional"):
            builtin("cosine", 2)

    def test_tensor_sum_requires_base(self):
        with pytest.raises(ValueError, match="base"):
            builtin("tensor_sum", 2)

    def test_tensor_sum_inherits_metadata(self):
        phase = builtin("tensor_sum", 3, base="weierstrass", alpha=0.5, depth=10)
        assert phase.m == 3
        assert phase.budget == SmoothnessBudget(1, 0.5)
        assert phase.max_freq == 2 ** 10

    @pytest.mark.parametrize("name", SMOOTH + ["weierstrass"])
    def test_periodicity_at_boundary(self, name):
        phase = builtin(name, 1, **({"k": 3} if name == "linear" else {}))
        t = np.linspace(0.0, 2 * np.pi, 17)
        left = phase.eval(pts1(t))
        right = phase.eval(pts1(t + 2 * np.pi))
        if name == "linear":
            # phi wraps by 2 pi k; the unimodular field is what is periodic
            np.testing.assert_allclose(np.exp(1j * left), np.exp(1j * right), atol=1e-9)
        else:
            np.testing.assert_allclose(left, right, atol=1e-9)

    @pytest.mark.parametrize("name", SMOOTH)
    def test_gradient_matches_central_differences(self, name):
        m = 2 if name in ("linear", "cosine_sum") else 1
        phase = builtin(name, m, **({"k": (2, 1)[:m]} if name == "linear" else {}))
        h = 2 * np.pi / 4096
        rng = np.random.default_rng(5)
        pts = rng.uniform(0, 2 * np.pi, (50, m))
        grad = phase.grad(pts)
        for j in range(m):
            shift = np.zeros(m)
            shift[j] = h
            fd = (phase.eval(pts + shift) - phase.eval(pts - shift)) / (2 * h)
            np.testing.assert_allclose(grad[:, j], fd, atol=5e-6)

    def test_weierstrass_difference_quotient_consistency(self):
        # only C^{1,alpha}: the finite-difference error is bounded by the
        # gradient modulus at h, not by h^2
        phase = builtin("weierstrass", 1, alpha=0.5, depth=12)
        h = 2 * np.pi / 4096
        t = np.linspace(0, 2 * np.pi, 200, endpoint=False)
        fd = (phase.eval(pts1(t + h)) - phase.eval(pts1(t - h))) / (2 * h)
        err = np.max(np.abs(fd - phase.grad(pts1(t))[:, 0]))
        assert err < 0.1  # ~ omega(h) = O(sqrt(h))


class TestModulusFit:
    def test_cosine_modulus_closed_form(self):
        fit = modulus_fit(builtin("cosine", 1), scales=[0.2, 0.1, 0.05],
                          pairs_per_scale=200_000)
        # sup |sin t1 - sin t2| over |t1 - t2| <= 0.1 equals 2 sin(0.05)
        measured = float(fit.table.omega(0.1))
        assert measured == pytest.approx(2 * np.sin(0.05), rel=0.02)

    def test_linear_modulus_is_zero(self):
        fit = modulus_fit(builtin("linear", 1, k=3), scales=[0.2, 0.1, 0.05],
                          pairs_per_scale=10_000)
        assert fit.degenerate
        assert np.all(fit.table.omegas <= 1e-14)
        with pytest.raises(ValueError):
            fit.power()

    def test_weierstrass_fitted_exponent(self):
        fit = modulus_fit(builtin("weierstrass", 1, alpha=0.5, depth=12))
        assert 0.4 <= fit.alpha <= 0.6

    def test_table_is_nondecreasing_with_zero_origin(self):
        fit = modulus_fit(builtin("cosine", 1), scales=[0.4, 0.2, 0.1],
                          pairs_per_scale=50_000)
        assert fit.table.omega(0.0) == 0.0
        assert np.all(np.diff(fit.table.omegas) >= 0)

    def test_scales_below_resolvable_spacing(self):
        with pytest.raises(ValueError, match="resolvable"):
            modulus_fit(builtin("cosine", 1), scales=[1e-2, 1e-7])


class TestGradientRange:
    def test_cosine_interval(self):
        grange = gradient_range(builtin("cosine", 1), 1024)
        assert grange.measure == pytest.approx(2.0, rel=0.03)

    def test_cosine_sum_square(self):
        grange = gradient_range(builtin("cosine_sum", 2), 1024)
        assert grange.measure == pytest.approx(4.0, rel=0.03)

    def test_linear_is_degenerate(self):
        assert gradient_range(builtin("linear", 2, k=(2, 1)), 256).measure == 0.0
        assert gradient_range(builtin("constant", 1), 256).measure == 0.0

    def test_tensor_weierstrass_positive_and_stable(self):
        phase = builtin("tensor_sum", 2, base="weierstrass", alpha=0.5, depth=12)
        g512 = gradient_range(phase, 512).measure
        g1024 = gradient_range(phase, 1024).measure
        assert g1024 > 0.0
        assert abs(g512 - g1024) / g1024 <= 0.10

    def test_outer_estimate_decreases_with_resolution(self):
        phase = builtin("weierstrass", 1, alpha=0.5, depth=12)
        g = [gradient_range(phase, r).measure for r in (256, 512, 1024)]
        assert g[0] >= g[1] - 1e-9 >= g[2] - 2e-9

    def test_resolution_validation(self):
        with pytest.raises(ValueError, match="resolution"):
            gradient_range(builtin("cosine", 1), 32)

    def test_cell_export_covers_image(self):
        grange = gradient_range(builtin("cosine", 1), 64, export_cells=True)
        assert grange.cells.shape == (grange.cell_count, 1)
        lo = grange.cells.min() * grange.cell_size
        hi = (grange.cells.max() + 1) * grange.cell_size
        assert lo <= -1.0 and hi >= 1.0


class TestTensorFactorization:
    def test_tensor_spectrum_is_outer_product(self):
        lam, n = 6.0, 128
        one = analyze(sample_phase(builtin("cosine", 1), lam, GridSpec(1, n)))
        two = analyze(sample_phase(builtin("tensor_sum", 2, base="cosine"), lam,
                                   GridSpec(2, n)))
        outer = np.multiply.outer(one.coefficients, one.coefficients)
        np.testing.assert_allclose(two.coefficients, outer, atol=1e-10)
