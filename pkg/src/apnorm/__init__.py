"""Coefficient-norm growth lab for oscillating phases on the torus.

Computes l^p norms of the Fourier coefficients of exp(i * lam * phi) for
real phases phi on T^m, fits growth exponents over frequency sweeps, and
emits machine-checked lower-bound certificates built from triangle-window
concentration of coefficient mass.
"""

__version__ = "0.1.0"

from .engine import (GridPolicy, GridResolutionError, NormEstimate, ap_norm,
                     dyadic_profile, holder_seminorm, interpolation_norm_bound,
                     smooth_upper_exponent, spectral_tail_bound)
from .certify import (Certificate, DegenerateGradientError, build_certificate,
                      concentration_check, triangle_hat, window_half_width)
from .growth import (GrowthReport, SweepPlan, SweepResult, dyadic_lambdas,
                     fit_exponent, growth_report, slow_growth_scale, sweep,
                     theory_exponents)
from .moduli import PowerModulus, TabulatedModulus
from .phases import (GradientRange, Phase, SmoothnessBudget, builtin,
                     gradient_range, list_builtins, modulus_fit)
from .spectra import (Field, GridSpec, Spectrum, analyze, annulus_mass, lp_sum,
                      sample_phase, synthesize)

__all__ = [
    "__version__",
    "GridPolicy", "GridResolutionError", "NormEstimate", "ap_norm",
    "dyadic_profile", "holder_seminorm", "interpolation_norm_bound",
    "smooth_upper_exponent", "spectral_tail_bound",
    "Certificate", "DegenerateGradientError", "build_certificate",
    "concentration_check", "triangle_hat", "window_half_width",
    "GrowthReport", "SweepPlan", "SweepResult", "dyadic_lambdas",
    "fit_exponent", "growth_report", "slow_growth_scale", "sweep",
    "theory_exponents",
    "PowerModulus", "TabulatedModulus",
    "GradientRange", "Phase", "SmoothnessBudget", "builtin",
    "gradient_range", "list_builtins", "modulus_fit",
    "Field", "GridSpec", "Spectrum", "analyze", "annulus_mass", "lp_sum",
    "sample_phase", "synthesize",
]
