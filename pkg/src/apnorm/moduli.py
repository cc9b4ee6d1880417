"""Moduli of continuity and the window scale chi(d) = d * omega(d).

A modulus omega is continuous, nondecreasing, omega(0) = 0.  Lower-bound
certificates need the inverse of chi: given a target y, the d solving
d * omega(d) = y.  Power-type moduli invert in closed form; tabulated ones
by monotone bisection.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PowerModulus:
    """omega(d) = coeff * d**alpha, 0 < alpha <= 1."""

    alpha: float
    coeff: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.coeff <= 0.0:
            raise ValueError(f"coeff must be positive, got {self.coeff}")

    def omega(self, delta):
        return self.coeff * np.asarray(delta, dtype=float) ** self.alpha

    def scale(self, delta):
        return np.asarray(delta, dtype=float) * self.omega(delta)

    def scale_inverse(self, y: float) -> float:
        """Closed form: chi(d) = coeff * d**(1+alpha) = y."""
        if y <= 0.0:
            raise ValueError(f"target must be positive, got {y}")
        return float((y / self.coeff) ** (1.0 / (1.0 + self.alpha)))


@dataclass(frozen=True)
class TabulatedModulus:
    """Piecewise-linear modulus through measured (delta, omega) pairs.

    The table is sorted and clamped to be nondecreasing; (0, 0) is implied.
    Queries beyond the largest tabulated delta are out of domain.
    """

    deltas: np.ndarray
    omegas: np.ndarray
    _xs: np.ndarray = field(init=False, repr=False, compare=False)
    _ys: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        d = np.asarray(self.deltas, dtype=float)
        w = np.asarray(self.omegas, dtype=float)
        if d.ndim != 1 or d.shape != w.shape or d.size == 0:
            raise ValueError("deltas and omegas must be equal-length 1-d arrays")
        if np.any(d <= 0) or np.any(w < 0):
            raise ValueError("deltas must be positive and omegas nonnegative")
        order = np.argsort(d)
        d, w = d[order], w[order]
        w = np.maximum.accumulate(w)
        xs = np.concatenate([[0.0], d])
        ys = np.concatenate([[0.0], w])
        object.__setattr__(self, "deltas", d)
        object.__setattr__(self, "omegas", w)
        object.__setattr__(self, "_xs", xs)
        object.__setattr__(self, "_ys", ys)

    @property
    def max_delta(self) -> float:
        return float(self._xs[-1])

    def omega(self, delta):
        delta = np.asarray(delta, dtype=float)
        if np.any(delta < 0) or np.any(delta > self.max_delta):
            raise ValueError(f"delta outside tabulated domain [0, {self.max_delta}]")
        return np.interp(delta, self._xs, self._ys)

    def scale(self, delta):
        return np.asarray(delta, dtype=float) * self.omega(delta)

    def scale_inverse(self, y: float, rel_tol: float = 1e-12) -> float:
        """Monotone bisection for chi(d) = y; result satisfies the relative
        residual |chi(d) - y| <= rel_tol * y."""
        if y <= 0.0:
            raise ValueError(f"target must be positive, got {y}")
        hi = self.max_delta
        top = float(self.scale(hi))
        if y > top:
            raise ValueError(f"target {y} exceeds chi({hi}) = {top} on the tabulated domain")
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            val = float(self.scale(mid))
            if abs(val - y) <= rel_tol * y:
                return mid
            if val < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
