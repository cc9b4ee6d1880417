"""Frequency sweeps, exponent fits and theoretical growth laws.

A sweep evaluates the norm over a (p, lam) grid, attaches the certified
lower bound and the interpolation upper bound to every row, and caches rows
on disk keyed by phase, parameters, grid and policy.  Exponents are fitted
by unweighted least squares on (log lam, log norm) after discarding a
pre-asymptotic prefix.
"""

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from . import certify
from .engine import (GridPolicy, GridResolutionError, NormEstimate,
                     holder_seminorm, interpolation_norm_bound, smooth_upper_exponent)
from .phases import Phase, SmoothnessBudget, builtin

CACHE_ENV = "APNORM_CACHE_DIR"
DEFAULT_DISCARD_PREFIX = 2


def default_cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, ".apnorm-cache"))


def dyadic_lambdas(lo: float, hi: float) -> tuple:
    """Dyadic ladder lo, 2*lo, ... capped at hi."""
    if lo < 1 or hi < lo:
        raise ValueError(f"need 1 <= lo <= hi, got [{lo}, {hi}]")
    out = []
    lam = float(lo)
    while lam <= hi * (1 + 1e-12):
        out.append(lam)
        lam *= 2.0
    return tuple(out)


@dataclass(frozen=True)
class SweepPlan:
    family: str
    m: int
    p_values: tuple
    lambdas: tuple
    params: dict = field(default_factory=dict)
    policy: GridPolicy = field(default_factory=GridPolicy)
    cache_dir: Path | None = None
    workers: int = 1

    def __post_init__(self):
        lams = tuple(float(v) for v in self.lambdas)
        if not lams or any(v < 1.0 for v in lams):
            raise ValueError("lambda values must be >= 1")
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ValueError("lambda values must be strictly increasing")
        ps = tuple(float(v) for v in self.p_values)
        if not ps or any(not 1.0 <= v <= 2.0 for v in ps):
            raise ValueError("p values must lie in [1, 2]")
        object.__setattr__(self, "lambdas", lams)
        object.__setattr__(self, "p_values", ps)

    def phase(self) -> Phase:
        return builtin(self.family, m=self.m, **self.params)


@dataclass(frozen=True)
class SweepRow:
    p: float
    lam: float
    estimate: NormEstimate | None
    cert_lower: float | None
    upper_bound: float | None
    theory_lower_exp: float | None
    theory_upper_exp: float | None
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    plan: SweepPlan
    phase_key: str
    rows: tuple
    nondegenerate: bool
    cache_hits: int


# ---------------------------------------------------------------------------
# row cache
# ---------------------------------------------------------------------------

def _row_key(plan: SweepPlan, phase: Phase, lam: float, p: float) -> str:
    policy = plan.policy
    payload = {
        "phase": phase.key(),
        "m": plan.m,
        "lam": lam,
        "p": p,
        "n": policy.initial_n(phase, lam, p),
        "policy": [policy.min_n, policy.bandwidth_factor, policy.phase_freq_factor,
                   policy.max_doublings, policy.annulus_rel_tol, policy.max_points,
                   policy.n_override],
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _cache_load(path: Path) -> NormEstimate | None:
    try:
        data = json.loads(path.read_text())
        return NormEstimate(**data)
    except (OSError, ValueError, TypeError):
        return None  # corrupt or absent records are recomputed


def _cache_store(path: Path, estimate: NormEstimate):
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(asdict(estimate), sort_keys=True))
    tmp.replace(path)


def _compute_row(args):
    family, params, m, lam, p, policy = args
    phase = builtin(family, m=m, **params)
    from .engine import ap_norm

    try:
        return ap_norm(phase, lam, p, policy), None
    except GridResolutionError as exc:
        return None, str(exc)


def sweep(plan: SweepPlan) -> SweepResult:
    """Evaluate all (p, lam) rows of the plan, cache-aware and in
    deterministic (p, lam) order regardless of completion order."""
    phase = plan.phase()
    cache_dir = plan.cache_dir
    if cache_dir is not None:
        cache_dir = Path(cache_dir)
        cache_dir.mkdir(parents=True, exist_ok=True)

    jobs = [(p, lam) for p in plan.p_values for lam in plan.lambdas]
    estimates: dict = {}
    errors: dict = {}
    hits = 0

    pending = []
    for p, lam in jobs:
        if cache_dir is not None:
            cached = _cache_load(cache_dir / f"{_row_key(plan, phase, lam, p)}.json")
            if cached is not None:
                estimates[(p, lam)] = cached
                hits += 1
                continue
        pending.append((p, lam))

    def job_args(p, lam):
        return (plan.family, plan.params, plan.m, lam, p, plan.policy)

    if plan.workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            results = list(pool.map(_compute_row, [job_args(p, lam) for p, lam in pending]))
    else:
        results = [_compute_row(job_args(p, lam)) for p, lam in pending]

    for (p, lam), (estimate, error) in zip(pending, results):
        if error is not None:
            errors[(p, lam)] = error
            continue
        estimates[(p, lam)] = estimate
        if cache_dir is not None:
            _cache_store(cache_dir / f"{_row_key(plan, phase, lam, p)}.json", estimate)

    inputs = certify.certificate_inputs(phase)
    nondegenerate = inputs.grange.measure > 0.0
    budget = phase.budget

    rows = []
    for p, lam in jobs:  # already ordered by (p, lam)
        err = errors.get((p, lam))
        theory = theory_exponents(plan.m, p, budget)
        lower_exp = theory.lower if (theory.lower_valid and nondegenerate) else None
        upper_exp = theory.upper if theory.upper_valid else None
        if err is not None:
            rows.append(SweepRow(p, lam, None, None, None, lower_exp, upper_exp, err))
            continue
        estimate = estimates[(p, lam)]
        cert_lower = certify.sweep_lower_bound(phase, lam, p, inputs)
        upper = None
        if p < 2.0 and budget.order > plan.m * (1.0 / p - 0.5):
            upper = interpolation_norm_bound(budget, holder_seminorm(phase, lam), 1.0, p, plan.m)
        rows.append(SweepRow(p, lam, estimate, cert_lower, upper, lower_exp, upper_exp))
    return SweepResult(plan, phase.key(), tuple(rows), nondegenerate, hits)


# ---------------------------------------------------------------------------
# exponent fitting and theory
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentFit:
    beta: float
    intercept: float
    residual_rms: float
    n_used: int


def fit_exponent(lams, values, discard_prefix: int = DEFAULT_DISCARD_PREFIX) -> ExponentFit:
    """Least squares on (log lam, log value) after dropping the first
    discard_prefix pre-asymptotic rows."""
    lams = np.asarray(lams, dtype=float)[discard_prefix:]
    values = np.asarray(values, dtype=float)[discard_prefix:]
    if lams.size < 4:
        raise ValueError(f"need >= 4 rows after discarding, got {lams.size}")
    if np.any(values <= 0):
        raise ValueError("values must be positive for a log-log fit")
    x = np.log(lams)
    y = np.log(values)
    design = np.vstack([np.ones_like(x), x]).T
    (intercept, slope), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([intercept, slope])
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return ExponentFit(float(slope), float(intercept), rms, int(lams.size))


@dataclass(frozen=True)
class TheoryExponents:
    """Growth exponents implied by the smoothness budget.

    lower: certified-rate exponent m(1/p - 1/(1+alpha_g)), valid for
    p < 1 + alpha_g (the nondegenerate-gradient hypothesis is tracked by the
    caller).  upper: m(1/p - 1/2) under the smooth upper bound hypotheses.
    two_sided: both match, for order >= 2 above the critical line.
    """

    lower: float
    lower_valid: bool
    upper: float
    upper_valid: bool
    two_sided: bool


def theory_exponents(m: int, p: float, budget: SmoothnessBudget) -> TheoryExponents:
    upper, upper_valid = smooth_upper_exponent(p, m, budget)
    if budget.nu < 1:
        lower, lower_valid = 0.0, False
    else:
        ag = budget.gradient_alpha
        lower = m * (1.0 / p - 1.0 / (1.0 + ag))
        lower_valid = p < 1.0 + ag
    two_sided = (budget.order >= 2.0 and budget.order > m * (1.0 / p - 0.5)
                 and lower_valid and upper_valid)
    return TheoryExponents(lower, lower_valid, upper, upper_valid, two_sided)


@dataclass(frozen=True)
class GrowthReport:
    phase_key: str
    m: int
    p: float
    fit: ExponentFit
    theory: TheoryExponents
    nondegenerate: bool
    theta_dominance_ratio: float | None = None


def growth_report(result: SweepResult, p: float,
                  discard_prefix: int | None = None,
                  theta_modulus=None) -> GrowthReport:
    rows = [r for r in result.rows if r.p == p and r.estimate is not None]
    lams = [r.lam for r in rows]
    values = [r.estimate.value for r in rows]
    if discard_prefix is None:
        # drop pre-asymptotic rows but keep at least 4 points in the fit
        discard_prefix = min(DEFAULT_DISCARD_PREFIX, max(0, len(rows) - 4))
    fit = fit_exponent(lams, values, discard_prefix)
    theory = theory_exponents(result.plan.m, p, result.plan.phase().budget)
    ratio = None
    if theta_modulus is not None:
        refs = np.array([slow_growth_scale(theta_modulus, p, lam) ** result.plan.m
                         for lam in lams])
        ratio = float(np.max(np.asarray(values) / refs))
    return GrowthReport(result.phase_key, result.plan.m, p, fit, theory,
                        result.nondegenerate, ratio)


# ---------------------------------------------------------------------------
# slow-growth reference scale
# ---------------------------------------------------------------------------

def slow_growth_scale(omega, p: float, y: float) -> float:
    """Reference scale for the slowest achievable norm growth in C^{1, omega}.

    p = 1:      (y / log y) * chi^{-1}((log y)^2 / y), needs y > e.
    1 < p < 2:  (integral_1^y chi^{-1}(1/tau)^p dtau)^{1/p}, needs y >= 1,
                by adaptive quadrature.
    """
    if not 1.0 <= p < 2.0:
        raise ValueError(f"the scale is defined for 1 <= p < 2, got {p}")
    if p == 1.0:
        if y <= math.e:
            raise ValueError(f"need y > e for p = 1, got {y}")
        log_y = math.log(y)
        return (y / log_y) * omega.scale_inverse(log_y ** 2 / y)
    if y < 1.0:
        raise ValueError(f"need y >= 1, got {y}")
    if y == 1.0:
        return 0.0
    val, _ = quad(lambda tau: omega.scale_inverse(1.0 / tau) ** p, 1.0, y, limit=200)
    return val ** (1.0 / p)
