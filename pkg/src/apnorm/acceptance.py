"""Acceptance criteria: one callable per criterion, used by the verify
command and by tests/test_acceptance.py.

Each criterion aggregates checks as error-over-tolerance ratios: the
criterion passes iff every ratio is <= 1, and the worst ratio doubles as a
marginality indicator for tightened-tolerance reporting.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import certify, growth, oracles
from .engine import ap_norm, holder_seminorm, interpolation_norm_bound, spectral_tail_bound
from .moduli import PowerModulus
from .phases import builtin

BOOL_FAIL = float("inf")


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    worst_ratio: float
    detail: str
    elapsed: float = 0.0
    checks: list = field(default_factory=list)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return (f"[{mark}] criterion {self.index:2d} {self.name}: {self.detail} "
                f"({self.elapsed:.1f}s)")


class _Checks:
    def __init__(self):
        self.ratios = []

    def bound(self, label: str, err: float, tol: float):
        self.ratios.append((label, abs(err) / tol))

    def flag(self, label: str, ok: bool):
        self.ratios.append((label, 0.0 if ok else BOOL_FAIL))

    def worst(self):
        return max((r for _, r in self.ratios), default=0.0)

    def passed(self):
        return all(r <= 1.0 for _, r in self.ratios)


def _result(index, name, checks: _Checks, detail: str, t0: float) -> CriterionResult:
    return CriterionResult(index, name, checks.passed(), checks.worst(),
                           detail, time.perf_counter() - t0, checks.ratios)


def _phase_set_m1():
    return [
        builtin("constant", 1, c=0.7),
        builtin("linear", 1, k=3),
        builtin("cosine", 1),
        builtin("weierstrass", 1, alpha=0.5, depth=12),
    ]


def _phase_set_m2():
    return [
        builtin("constant", 2),
        builtin("linear", 2, k=(2, 1)),
        builtin("cosine_sum", 2),
        builtin("tensor_sum", 2, base="cosine"),
        builtin("tensor_sum", 2, base="weierstrass", alpha=0.5, depth=12),
    ]


def criterion_parseval() -> CriterionResult:
    t0 = time.perf_counter()
    checks = _Checks()
    worst = 0.0
    for phase in _phase_set_m1() + _phase_set_m2():
        for lam in (1.0, 8.0, 64.0):
            value = ap_norm(phase, lam, 2.0).value
            err = abs(value - 1.0)
            worst = max(worst, err)
            checks.bound(f"{phase.key()} lam={lam}", err, 1e-9)
    return _result(1, "parseval control", checks,
                   f"max |norm(p=2) - 1| = {worst:.3e} over all built-ins", t0)


def criterion_oracle_agreement() -> CriterionResult:
    t0 = time.perf_counter()
    checks = _Checks()
    phase = builtin("cosine")
    worst = 0.0
    for lam in (1.0, 5.0, 10.0, 20.0):
        for p in (1.0, 1.5):
            fast = ap_norm(phase, lam, p).value
            ref = oracles.cosine_phase_norm(lam, p)
            rel = abs(fast - ref) / ref
            worst = max(worst, rel)
            checks.bound(f"lam={lam} p={p}", rel, 1e-8)
    return _result(2, "oracle agreement", checks,
                   f"max relative error vs recurrence oracle = {worst:.3e}", t0)


def criterion_two_sided_exponent() -> CriterionResult:
    t0 = time.perf_counter()
    checks = _Checks()
    details = []
    cases = [
        (builtin("cosine", 1), growth.dyadic_lambdas(8, 256), 0.05),
        (builtin("cosine_sum", 2), growth.dyadic_lambdas(8, 128), 0.10),
    ]
    for phase, lams, tol in cases:
        discard = min(growth.DEFAULT_DISCARD_PREFIX, len(lams) - 4)
        for p in (1.0, 1.5):
            values = [ap_norm(phase, lam, p).value for lam in lams]
            fit = growth.fit_exponent(lams, values, discard)
            target = phase.m * (1.0 / p - 0.5)
            checks.bound(f"{phase.name} p={p}", fit.beta - target, tol)
            details.append(f"{phase.name},p={p}: {fit.beta:+.3f} vs {target:+.3f}")
    return _result(3, "two-sided growth exponent", checks, "; ".join(details), t0)


def criterion_tensor_multiplicativity() -> CriterionResult:
    t0 = time.perf_counter()
    checks = _Checks()
    base = builtin("cosine", 1)
    tensor = builtin("tensor_sum", 2, base="cosine")
    worst = 0.0
    for lam in (8.0, 32.0):
        for p in (1.0, 1.5):
            one = ap_norm(base, lam, p).value
            two = ap_norm(tensor, lam, p).value
            rel = abs(two - one ** 2) / two
            worst = max(worst, rel)
            checks.bound(f"lam={lam} p={p}", rel, 1e-8)
    return _result(4, "tensor multiplicativity", checks,
                   f"max relative defect = {worst:.3e}", t0)


def criterion_certificate_soundness() -> CriterionResult:
    t0 = time.perf_counter()
    checks = _Checks()
    lams = (16.0, 32.0, 64.0, 128.0)
    details = []
    for phase in (builtin("cosine", 1), builtin("cosine_sum", 2)):
        inputs = certify.certificate_inputs(phase)
        for p in (1.0, 1.5):
            bounds = []
            for lam in lams:
                cert = certify.build_certificate(phase, lam, p, inputs=inputs)
                checks.flag(f"{phase.name} lam={lam} p={p} sound",
                            cert.sound and cert.bound <= cert.norm_value)
                bounds.append(cert.bound)
            fit = growth.fit_exponent(lams, bounds, discard_prefix=0)
            target = phase.m * (1.0 / p - 0.5)
            checks.bound(f"{phase.name} p={p} bound exponent", fit.beta - target, 1e-6)
            details.append(f"{phase.name},p={p}: bound slope {fit.beta:+.8f}")
    return _result(5, "certificate soundness", checks, "; ".join(details), t0)


def criterion_concentration() -> CriterionResult:
    t0 = time.perf_counter()
    checks = _Checks()
    phase = builtin("cosine", 1)
    inputs = certify.certificate_inputs(phase)
    rates = []
    for lam in (16.0, 64.0):
        cert = certify.build_certificate(phase, lam, 1.0, inputs=inputs, n_samples=100)
        rates.append(cert.pass_rate)
        checks.bound(f"lam={lam} pass rate", 1.0 - cert.pass_rate, 0.05)
    return _result(6, "window concentration", checks,
                   f"pass rates = {rates}", t0)


def criterion_upper_sandwich() -> CriterionResult:
    t0 = time.perf_counter()
    checks = _Checks()
    phase = builtin("cosine", 1)
    details = []
    for lam in (8.0, 32.0):
        estimate = ap_norm(phase, lam, 1.0)
        seminorm = holder_seminorm(phase, lam)
        upper = interpolation_norm_bound(phase.budget, seminorm, 1.0, 1.0, 1)
        checks.flag(f"lam={lam} interpolation bound >= norm", upper >= estimate.value)
        cutoff = int(4 * lam)
        tail = spectral_tail_bound(phase.budget, seminorm, cutoff, 1.0, 1)
        true_tail = oracles.cosine_phase_tail(lam, cutoff, 1.0)
        checks.flag(f"lam={lam} tail bound >= true tail", tail >= true_tail)
        details.append(f"lam={lam}: norm {estimate.value:.3f} <= bound {upper:.1f}, "
                       f"tail {true_tail:.2e} <= {tail:.2e}")
    return _result(7, "upper-bound sandwich", checks, "; ".join(details), t0)


def criterion_slow_growth_scales() -> CriterionResult:
    t0 = time.perf_counter()
    checks = _Checks()
    lip = PowerModulus(1.0)
    for y in (100.0, 1e4):
        val = growth.slow_growth_scale(lip, 1.0, y)
        checks.bound(f"p=1 y={y}", val / math.sqrt(y) - 1.0, 1e-12)

    half = PowerModulus(0.5)
    ys = np.logspace(2, 4, 9)
    vals = [growth.slow_growth_scale(half, 1.2, y) for y in ys]
    fit = growth.fit_exponent(ys, vals, discard_prefix=0)
    target = 1.0 / 1.2 - 1.0 / 1.5
    checks.bound("p=1.2 fitted slope", (fit.beta - target) / target, 0.02)

    ratio = (growth.slow_growth_scale(half, 1.8, 1e4)
             / growth.slow_growth_scale(half, 1.8, 1e2))
    checks.flag("p=1.8 bounded ratio < 1.2", ratio < 1.2)
    return _result(8, "slow-growth reference scales", checks,
                   f"p=1.2 slope {fit.beta:.4f} vs {target:.4f}; "
                   f"p=1.8 ratio {ratio:.4f}", t0)


def criterion_degenerate_hypothesis() -> CriterionResult:
    t0 = time.perf_counter()
    checks = _Checks()
    for phase in (builtin("linear", 1, k=3), builtin("linear", 2, k=(2, 1))):
        for lam in (1.0, 4.0):
            value = ap_norm(phase, lam, 1.0).value
            # single resolved harmonic; slack covers fft rounding summed
            # over the n^m zero coefficients
            checks.bound(f"{phase.key()} lam={lam} norm", value - 1.0, 1e-10)
        refused = False
        try:
            certify.build_certificate(phase, 4.0, 1.0)
        except certify.DegenerateGradientError:
            refused = True
        checks.flag(f"{phase.key()} certificate refused", refused)
    return _result(9, "degenerate-hypothesis behavior", checks,
                   "linear phases: unit norms and certificate refusal", t0)


def criterion_weierstrass_bracket() -> CriterionResult:
    t0 = time.perf_counter()
    checks = _Checks()
    phase = builtin("weierstrass", 1, alpha=0.5, depth=12)
    lams = growth.dyadic_lambdas(8, 256)
    values = [ap_norm(phase, lam, 1.0).value for lam in lams]
    fit = growth.fit_exponent(lams, values)
    lo, hi = 1.0 / 3.0 - 0.1, 0.5 + 0.05
    mid, rad = 0.5 * (lo + hi), 0.5 * (hi - lo)
    checks.bound("bracket", fit.beta - mid, rad)
    return _result(10, "weierstrass growth bracket", checks,
                   f"fitted exponent {fit.beta:.4f}, bracket [{lo:.4f}, {hi:.4f}], "
                   f"norms {np.round(values, 3).tolist()}", t0)


ALL_CRITERIA = [
    criterion_parseval,
    criterion_oracle_agreement,
    criterion_two_sided_exponent,
    criterion_tensor_multiplicativity,
    criterion_certificate_soundness,
    criterion_concentration,
    criterion_upper_sandwich,
    criterion_slow_growth_scales,
    criterion_degenerate_hypothesis,
    criterion_weierstrass_bracket,
]


def run_all() -> list:
    return [fn() for fn in ALL_CRITERIA]
