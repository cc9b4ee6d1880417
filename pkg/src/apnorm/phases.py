"""Catalog of real phase functions on the m-torus.

Every built-in is a tensor sum phi(t) = f_1(t_1) + ... + f_m(t_m) of
one-dimensional profiles, which keeps gradient evaluation cheap: the
gradient is (f_1'(t_1), ..., f_m'(t_m)).

Besides evaluators each phase carries the metadata the norm engine and the
certificate builder need: a smoothness budget (nu, alpha), a per-axis
gradient bound, and the largest lattice frequency present in the phase
itself (drives grid sizing).
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .moduli import PowerModulus, TabulatedModulus

DEFAULT_WEIERSTRASS_DEPTH = 12
_MODULUS_SEED = 20210909


@dataclass(frozen=True)
class SmoothnessBudget:
    """Differentiability class C^{nu, alpha}: nu derivatives, the top ones
    Lipschitz of order alpha (alpha = 0 means plain C^nu)."""

    nu: int
    alpha: float

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError(f"nu must be >= 0, got {self.nu}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")

    @property
    def order(self) -> float:
        return self.nu + self.alpha

    @property
    def gradient_alpha(self) -> float:
        """Lipschitz order of the gradient implied by the budget."""
        if self.nu < 1:
            raise ValueError("phase must be at least C^1 to speak of its gradient")
        return min(1.0, self.nu - 1 + self.alpha)

    def gradient_modulus(self) -> PowerModulus:
        return PowerModulus(self.gradient_alpha)


@dataclass(frozen=True)
class AxisProfile:
    f: Callable
    df: Callable


@dataclass(frozen=True)
class Phase:
    name: str
    m: int
    params: dict
    budget: SmoothnessBudget
    gradient_bound: float
    max_freq: int
    axes: tuple
    periodic: bool = True

    def _check_points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 0 or pts.shape[-1] != self.m:
            raise ValueError(f"points must have {self.m} components on the last axis")
        return pts

    def eval(self, pts) -> np.ndarray:
        pts = self._check_points(pts)
        out = np.zeros(pts.shape[:-1])
        for j, ax in enumerate(self.axes):
            out += ax.f(pts[..., j])
        return out

    def grad(self, pts) -> np.ndarray:
        pts = self._check_points(pts)
        comps = [ax.df(pts[..., j]) for j, ax in enumerate(self.axes)]
        return np.stack(np.broadcast_arrays(*comps), axis=-1)

    def axis_grad(self, j: int, x) -> np.ndarray:
        return self.axes[j].df(np.asarray(x, dtype=float))

    def key(self) -> str:
        items = ",".join(f"{k}={self.params[k]!r}" for k in sorted(self.params))
        return f"{self.name}[m={self.m};{items}]"


def _weierstrass_profile(alpha: float, depth: int) -> AxisProfile:
    amps = 2.0 ** (-(1.0 + alpha) * np.arange(1, depth + 1))
    freqs = 2.0 ** np.arange(1, depth + 1)

    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for a, w in zip(amps, freqs):
            out += a * np.cos(w * t)
        return out

    def df(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for a, w in zip(amps, freqs):
            out -= a * w * np.sin(w * t)
        return out

    return AxisProfile(f, df)


def _cos_profile() -> AxisProfile:
    return AxisProfile(np.cos, lambda t: -np.sin(np.asarray(t, dtype=float)))


def _const_profile(c: float) -> AxisProfile:
    def f(t):
        return np.full(np.shape(np.asarray(t)), c, dtype=float)

    def df(t):
        return np.zeros(np.shape(np.asarray(t)))

    return AxisProfile(f, df)


def _linear_profile(k: int) -> AxisProfile:
    def f(t):
        return float(k) * np.asarray(t, dtype=float)

    def df(t):
        return np.full(np.shape(np.asarray(t)), float(k))

    return AxisProfile(f, df)


BUILTIN_SCHEMAS = {
    "constant": {"c": "offset value (default 0)"},
    "linear": {"k": "integer frequency vector, one entry per axis"},
    "cosine": {},
    "cosine_sum": {},
    "weierstrass": {
        "alpha": "Lipschitz order of the derivative, in (0, 1]",
        "depth": f"number of dyadic terms (default {DEFAULT_WEIERSTRASS_DEPTH})",
    },
    "tensor_sum": {"base": "name of a 1-d family", "...": "parameters of that family"},
}


def list_builtins() -> dict:
    return {name: dict(schema) for name, schema in BUILTIN_SCHEMAS.items()}


def builtin(name: str, m: int = 1, **params) -> Phase:
    """Construct a built-in phase by family name."""
    if m < 1:
        raise ValueError(f"dimension must be >= 1, got {m}")
    smooth = SmoothnessBudget(2, 1.0)

    if name == "constant":
        c = float(params.get("c", 0.0))
        axes = (_const_profile(c),) + tuple(_const_profile(0.0) for _ in range(m - 1))
        return Phase("constant", m, {"c": c}, smooth, 0.0, 0, axes)

    if name == "linear":
        k = params.get("k", (1,) * m)
        if np.isscalar(k):
            k = (int(k),)
        k = tuple(int(v) for v in k)
        if len(k) != m:
            raise ValueError(f"linear phase needs {m} frequency components, got {k}")
        axes = tuple(_linear_profile(v) for v in k)
        bound = float(max(abs(v) for v in k))
        # phi itself wraps by 2*pi*k per period; exp(i*lam*phi) is periodic
        # exactly at integer lam
        return Phase("linear", m, {"k": k}, smooth, bound, int(bound), axes, periodic=False)

    if name == "cosine":
        if m != 1:
            raise ValueError("cosine is one-dimensional; use cosine_sum for m > 1")
        return Phase("cosine", 1, {}, smooth, 1.0, 1, (_cos_profile(),))

    if name == "cosine_sum":
        axes = tuple(_cos_profile() for _ in range(m))
        return Phase("cosine_sum", m, {}, smooth, 1.0, 1, axes)

    if name == "weierstrass":
        alpha = float(params.get("alpha", 0.5))
        depth = int(params.get("depth", DEFAULT_WEIERSTRASS_DEPTH))
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"weierstrass alpha must lie in (0, 1], got {alpha}")
        if m != 1:
            raise ValueError("weierstrass is one-dimensional; wrap it in tensor_sum")
        if depth < 1:
            raise ValueError(f"depth must be >= 1, got {depth}")
        bound = float(np.sum(2.0 ** (-alpha * np.arange(1, depth + 1))))
        return Phase(
            "weierstrass",
            1,
            {"alpha": alpha, "depth": depth},
            SmoothnessBudget(1, alpha),
            bound,
            2 ** depth,
            (_weierstrass_profile(alpha, depth),),
        )

    if name == "tensor_sum":
        base_name = params.pop("base", None)
        if base_name is None:
            raise ValueError("tensor_sum needs base=<1-d family name>")
        base = builtin(base_name, m=1, **params)
        axes = tuple(base.axes[0] for _ in range(m))
        merged = {"base": base_name, **base.params}
        return Phase(
            f"tensor_sum({base_name})",
            m,
            merged,
            base.budget,
            base.gradient_bound,
            base.max_freq,
            axes,
            periodic=base.periodic,
        )

    raise ValueError(f"unknown phase family {name!r}; known: {sorted(BUILTIN_SCHEMAS)}")


# ---------------------------------------------------------------------------
# gradient modulus of continuity, by sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModulusFit:
    """Sampled gradient modulus with a fitted power law."""

    table: TabulatedModulus
    alpha: float
    coeff: float
    degenerate: bool = field(default=False)

    def power(self) -> PowerModulus:
        if self.degenerate:
            raise ValueError("gradient modulus is identically zero; no power model")
        return PowerModulus(self.alpha, self.coeff)


def default_scales(m: int) -> np.ndarray:
    top = -2
    bottom = -9 if m == 1 else -6
    return 2.0 ** np.arange(top, bottom - 1, -1)


def modulus_fit(phase: Phase, scales=None, pairs_per_scale: int = 1_000_000,
                seed: int = _MODULUS_SEED) -> ModulusFit:
    """Estimate omega(grad phi, delta) = sup_{|t-s|<=delta} |grad(t) - grad(s)|.

    Per scale the supremum is sampled over all axis-aligned pairs at exact lag
    delta on a fine grid plus pairs_per_scale random pairs at distance delta.
    The fitted exponent comes from a log-log regression over the scales.
    """
    if scales is None:
        scales = default_scales(phase.m)
    scales = np.sort(np.asarray(scales, dtype=float))[::-1]
    if scales.size < 2 or np.any(scales <= 0):
        raise ValueError("need at least two positive scales")

    min_delta = float(scales[-1])
    n_ax = max(4, 8 * phase.max_freq)  # resolve the gradient's own oscillation
    while 2.0 * np.pi / n_ax > min_delta / 8.0:
        n_ax *= 2
        if n_ax > 2 ** 21:
            raise ValueError(f"scale {min_delta} is below resolvable spacing")
    t_ax = 2.0 * np.pi * np.arange(n_ax) / n_ax

    rng = np.random.default_rng(seed)
    omegas = np.empty(scales.size)
    for i, delta in enumerate(scales):
        best = 0.0
        for j in range(phase.m):
            g = phase.axis_grad(j, t_ax)
            gs = phase.axis_grad(j, t_ax + delta)
            best = max(best, float(np.max(np.abs(gs - g))))
        if phase.m == 1:
            t1 = rng.uniform(0.0, 2.0 * np.pi, pairs_per_scale)
            diff = phase.axis_grad(0, t1 + delta) - phase.axis_grad(0, t1)
            best = max(best, float(np.max(np.abs(diff))))
        else:
            t1 = rng.uniform(0.0, 2.0 * np.pi, (pairs_per_scale, phase.m))
            direction = rng.normal(size=(pairs_per_scale, phase.m))
            direction /= np.linalg.norm(direction, axis=1, keepdims=True)
            t2 = t1 + delta * direction
            sq = np.zeros(pairs_per_scale)
            for j in range(phase.m):
                sq += (phase.axis_grad(j, t2[:, j]) - phase.axis_grad(j, t1[:, j])) ** 2
            best = max(best, float(np.sqrt(np.max(sq))))
        omegas[i] = best

    table = TabulatedModulus(scales, omegas)
    if np.all(omegas <= 1e-14):
        return ModulusFit(table, 0.0, 0.0, degenerate=True)
    mask = omegas > 0
    x = np.log(scales[mask])
    y = np.log(omegas[mask])
    design = np.vstack([np.ones_like(x), x]).T
    (intercept, slope), *_ = np.linalg.lstsq(design, y, rcond=None)
    return ModulusFit(table, float(slope), float(np.exp(intercept)))


# ---------------------------------------------------------------------------
# outer-measure estimate of the gradient range
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradientRange:
    """Outer covering estimate of |grad phi (T^m)|."""

    measure: float
    cell_size: float
    cell_count: int
    resolution: int
    cells: np.ndarray | None = None


_OVERSAMPLE = 64


def _merge_cell_intervals(lo: np.ndarray, hi: np.ndarray):
    """Union size and merged spans of the integer cell intervals [lo_i, hi_i]."""
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    cum_hi = np.maximum.accumulate(hi)
    starts = np.concatenate([[True], lo[1:] > cum_hi[:-1] + 1])
    start_idx = np.flatnonzero(starts)
    end_idx = np.concatenate([start_idx[1:] - 1, [lo.size - 1]])
    lengths = cum_hi[end_idx] - lo[start_idx] + 1
    return int(np.sum(lengths)), np.stack([lo[start_idx], cum_hi[end_idx]], axis=1)


def gradient_range(phase: Phase, resolution: int = 1024,
                   export_cells: bool = False) -> GradientRange:
    """Cover the gradient image with cells and report count * side^m.

    Phases are axis sums, so the image is the product of the per-axis
    derivative images; each factor is covered by the value intervals between
    consecutive samples (resolution * 64 per axis), inflated by the measured
    modulus at the sample spacing.  The product covering contains the full
    continuous image and converges to the outer measure from above as the
    resolution grows.
    """
    if resolution < 64:
        raise ValueError(f"resolution must be >= 64, got {resolution}")
    m = phase.m
    n_samp = _OVERSAMPLE * resolution
    h = 2.0 * np.pi / n_samp
    t_ax = h * np.arange(n_samp)
    axis_values = [phase.axis_grad(j, t_ax) for j in range(m)]

    spans = [float(np.max(g) - np.min(g)) for g in axis_values]
    if max(spans) < 1e-12:
        return GradientRange(0.0, 0.0, 0, resolution,
                             cells=np.zeros((0, m), dtype=np.int64) if export_cells else None)

    # continuity gap between adjacent samples, probed at the diagonal spacing
    lag = h * np.sqrt(m)
    omega_h = max(
        float(np.max(np.abs(phase.axis_grad(j, t_ax + lag) - axis_values[j])))
        for j in range(m)
    )
    side = max(omega_h, h)

    count = 1
    axis_spans = []
    for values in axis_values:
        nxt = np.roll(values, -1)
        lo = np.floor((np.minimum(values, nxt) - omega_h) / side).astype(np.int64)
        hi = np.floor((np.maximum(values, nxt) + omega_h) / side).astype(np.int64)
        axis_count, merged = _merge_cell_intervals(lo, hi)
        count *= axis_count
        axis_spans.append(merged)

    cells = None
    if export_cells:
        if count > 2 ** 22:
            raise ValueError(f"cell export of {count} cells exceeds the budget")
        axis_idx = [np.concatenate([np.arange(a, b + 1) for a, b in spans_j])
                    for spans_j in axis_spans]
        mesh = np.meshgrid(*axis_idx, indexing="ij")
        cells = np.stack([v.ravel() for v in mesh], axis=-1)
    return GradientRange(float(count) * side ** m, float(side), int(count),
                         resolution, cells=cells)
