import math

import numpy as np
import pytest

from apnorm import (GridPolicy, GridSpec, analyze, ap_norm, builtin,
                    dyadic_profile, holder_seminorm, interpolation_norm_bound,
                    sample_phase, smooth_upper_exponent, spectral_tail_bound)
from apnorm.engine import (GridResolutionError, shell_bound_constants,
                           shell_difference_identity)
from apnorm.oracles import cosine_phase_norm, cosine_phase_tail
from apnorm.phases import SmoothnessBudget


class TestApNorm:
    def test_zero_frequency_gives_unit_norm(self):
        for name in ("cosine", "constant"):
            est = ap_norm(builtin(name, 1), 0.0, 1.0)
            assert est.value == pytest.approx(1.0, abs=1e-12)

    def test_linear_phase_single_harmonic(self):
        est = ap_norm(builtin("linear", 1, k=2), 1.0, 1.0)
        assert est.value == pytest.approx(1.0, abs=1e-10)

    def test_cosine_matches_bessel_oracle(self):
        for lam in (5.0, 20.0):
            for p in (1.0, 1.5):
                est = ap_norm(builtin("cosine", 1), lam, p)
                assert est.value == pytest.approx(cosine_phase_norm(lam, p), rel=1e-8)

    def test_negative_lam_same_norm(self):
        plus = ap_norm(builtin("cosine", 1), 6.0, 1.0).value
        minus = ap_norm(builtin("cosine", 1), -6.0, 1.0).value
        assert minus == pytest.approx(plus, rel=1e-12)

    def test_p2_is_parseval_control(self):
        est = ap_norm(builtin("weierstrass", 1, alpha=0.5, depth=12), 8.0, 2.0)
        assert est.value == pytest.approx(1.0, abs=1e-9)
        assert est.doublings == 0  # no annulus-driven refinement at p = 2

    def test_value_at_least_one_for_unimodular(self):
        for p in (1.0, 1.3, 1.7, 2.0):
            est = ap_norm(builtin("cosine", 1), 9.0, p)
            assert est.value >= 1.0 - 1e-12

    def test_non_integer_linear_frequency_unresolvable(self):
        # exp(i 0.5 * 3 t) wraps discontinuously: mass never leaves the annulus
        with pytest.raises(GridResolutionError, match="unresolved"):
            ap_norm(builtin("linear", 1, k=3), 0.5, 1.0)

    def test_policy_memory_budget(self):
        policy = GridPolicy(max_points=2 ** 10)
        with pytest.raises(GridResolutionError, match="budget"):
            ap_norm(builtin("cosine_sum", 2), 64.0, 1.0, policy)

    def test_grid_override(self):
        est = ap_norm(builtin("cosine", 1), 5.0, 1.0, GridPolicy(n_override=256))
        assert est.grid_n == 256

    def test_p_validation(self):
        with pytest.raises(ValueError):
            ap_norm(builtin("cosine", 1), 1.0, 2.5)

    def test_tail_unbounded_below_critical_line(self):
        # order 1.5 <= m (1/p - 1/2) = 1.5 at m = 3, p = 1
        phase = builtin("tensor_sum", 3, base="weierstrass", alpha=0.5, depth=4)
        est = ap_norm(phase, 0.0, 1.0, GridPolicy(n_override=64))
        assert est.tail_unbounded
        assert est.tail_bound == math.inf


class TestDyadicProfile:
    def test_single_harmonic_shell(self):
        spec = analyze(sample_phase(builtin("linear", 1, k=3), 1.0, GridSpec(1, 64)))
        prof = dyadic_profile(spec)
        # k = 3 lies in shell 2:  2 <= |k| < 4
        assert prof.shell_sums[1] == pytest.approx(1.0, abs=1e-12)
        others = np.delete(prof.shell_sums, 1)
        assert np.max(others) < 1e-20

    def test_profile_partitions_l2_mass(self):
        spec = analyze(sample_phase(builtin("cosine", 1), 5.0, GridSpec(1, 256)))
        prof = dyadic_profile(spec)
        assert prof.total() == pytest.approx(1.0, abs=1e-12)

    def test_cosine_shells_match_bessel_oracle(self):
        from apnorm.oracles import bessel_coefficients

        spec = analyze(sample_phase(builtin("cosine", 1), 5.0, GridSpec(1, 256)))
        prof = dyadic_profile(spec)
        j = bessel_coefficients(5.0, 80)
        for shell in (1, 2, 3, 4):
            ks = [k for k in range(1, 65) if 2 ** (shell - 1) <= k < 2 ** shell]
            expected = 2.0 * sum(j[k] ** 2 for k in ks)
            assert prof.shell_sums[shell - 1] == pytest.approx(expected, rel=1e-10,
                                                               abs=1e-25)

    def test_smooth_field_shell_decay(self):
        # spectra of resolved smooth fields decay super-algebraically:
        # past the phase bandwidth successive shells drop by >> 2^{-2s}
        spec = analyze(sample_phase(builtin("cosine", 1), 5.0, GridSpec(1, 256)))
        prof = dyadic_profile(spec)
        s4, s5 = prof.shell_sums[3], prof.shell_sums[4]
        assert s5 / s4 < 2.0 ** (-2 * 4)
        assert prof.shell_sums[5] / s5 < 2.0 ** (-2 * 4)


class TestShellIdentity:
    def test_identity_1d(self):
        for nu in (0, 1):
            lhs, rhs = shell_difference_identity(
                builtin("cosine", 1), 3.0, GridSpec(1, 64), nu, 0.05, np.array([1.0]), 0)
            assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_identity_2d_oblique_direction(self):
        lhs, rhs = shell_difference_identity(
            builtin("cosine_sum", 2), 3.0, GridSpec(2, 64), 1, 0.07,
            np.array([0.6, 0.8]), 1)
        assert lhs == pytest.approx(rhs, rel=1e-8)


class TestTailBound:
    def test_constants_example(self):
        consts = shell_bound_constants(SmoothnessBudget(1, 1.0), 1.0, 1)
        assert consts.tau == pytest.approx(0.25)
        assert consts.rate == pytest.approx(1.5)  # p (nu+alpha) (1 - tau)

    def test_monotone_vanishing_in_cutoff(self):
        budget = SmoothnessBudget(1, 1.0)
        bounds = [spectral_tail_bound(budget, 10.0, b, 1.0, 1)
                  for b in (1.0, 10.0, 100.0, 1e6)]
        assert all(a > b for a, b in zip(bounds, bounds[1:]))
        assert bounds[-1] < 1e-3 * bounds[0]

    def test_dominates_true_bessel_tail(self):
        lam, cutoff = 5.0, 40
        phase = builtin("cosine", 1)
        bound = spectral_tail_bound(phase.budget, holder_seminorm(phase, lam),
                                    cutoff, 1.0, 1)
        true_tail = cosine_phase_tail(lam, cutoff, 1.0)
        assert true_tail < 1e-20
        assert bound >= true_tail

    def test_below_critical_line_rejected(self):
        with pytest.raises(ValueError, match="critical line"):
            spectral_tail_bound(SmoothnessBudget(1, 0.0), 1.0, 10.0, 1.0, 3)


class TestUpperExponent:
    def test_smooth_two_dimensional(self):
        exp, valid = smooth_upper_exponent(1.0, 2, SmoothnessBudget(2, 0.0))
        assert (exp, valid) == (1.0, True)

    def test_parseval_endpoint(self):
        exp, valid = smooth_upper_exponent(2.0, 1, SmoothnessBudget(1, 0.0))
        assert (exp, valid) == (0.0, True)

    def test_hypothesis_failure(self):
        exp, valid = smooth_upper_exponent(1.0, 3, SmoothnessBudget(1, 0.0))
        assert not valid
        assert exp == pytest.approx(1.5)


class TestInterpolationBound:
    def test_balanced_case(self):
        budget = SmoothnessBudget(1, 1.0)
        consts = shell_bound_constants(budget, 1.0, 1)
        bound = interpolation_norm_bound(budget, 3.0, 3.0, 1.0, 1)
        assert bound == pytest.approx((consts.tail + consts.head) * 3.0, rel=1e-12)

    def test_homogeneity(self):
        budget = SmoothnessBudget(1, 1.0)
        one = interpolation_norm_bound(budget, 5.0, 0.5, 1.3, 2)
        two = interpolation_norm_bound(budget, 10.0, 1.0, 1.3, 2)
        assert two == pytest.approx(2.0 * one, rel=1e-12)

    def test_dominates_cosine_norm_and_scales_like_sqrt(self):
        phase = builtin("cosine", 1)
        budget = SmoothnessBudget(1, 1.0)
        bounds = {}
        for lam in (10.0, 40.0):
            seminorm = holder_seminorm(phase, lam, budget)  # ~ c lam^2
            bounds[lam] = interpolation_norm_bound(budget, seminorm, 1.0, 1.0, 1)
            assert bounds[lam] >= cosine_phase_norm(lam, 1.0)
        # tau = 1/4, seminorm an exact power law: bound scales as lam^(1/2)
        assert bounds[40.0] / bounds[10.0] == pytest.approx(2.0, rel=1e-9)

    def test_tau_validation(self):
        with pytest.raises(ValueError, match="tau"):
            interpolation_norm_bound(SmoothnessBudget(1, 0.0), 1.0, 1.0, 2.0, 1)


class TestSoundnessSandwich:
    def test_norm_between_certificate_and_interpolation_bound(self):
        from apnorm import certify

        phase = builtin("cosine", 1)
        inputs = certify.certificate_inputs(phase)
        for lam in (8.0, 32.0):
            est = ap_norm(phase, lam, 1.0)
            lower = certify.sweep_lower_bound(phase, lam, 1.0, inputs)
            upper = interpolation_norm_bound(phase.budget, holder_seminorm(phase, lam),
                                             1.0, 1.0, 1)
            assert lower <= est.value <= upper
