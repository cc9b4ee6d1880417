"""Independent brute-force references used by tests and the verify command.

Deliberately slow and simple, and sharing no code with the fast transform
path: a quadratic-cost direct Fourier sum, and Bessel coefficients by
downward recurrence for the cosine phase via the expansion

    exp(i lam cos t) = sum_k i^k J_k(lam) exp(i k t).
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    oracle_value: float
    fast_value: float
    abs_error: float
    rel_error: float

    @classmethod
    def compare(cls, quantity: str, oracle_value: float, fast_value: float) -> "OracleReport":
        abs_err = abs(oracle_value - fast_value)
        scale = max(abs(oracle_value), abs(fast_value), 1e-300)
        return cls(quantity, oracle_value, fast_value, abs_err, abs_err / scale)


def direct_coefficient(field, k) -> complex:
    """Fourier coefficient by direct summation, n^{-m} sum_j f(t_j) e^{-i(k, t_j)}."""
    grid = field.grid
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.shape != (grid.m,):
        raise ValueError(f"frequency must have {grid.m} components")
    if np.any(np.abs(k) > grid.n // 2):
        raise ValueError(f"frequency {tuple(k)} outside the resolved box")
    pts = grid.points()
    dot = np.zeros(grid.shape)
    for j in range(grid.m):
        dot = dot + k[j] * pts[..., j]
    return complex(np.sum(field.values * np.exp(-1j * dot)) / grid.total)


def bessel_coefficients(lam: float, kmax: int) -> np.ndarray:
    """J_0(lam) .. J_kmax(lam) by downward recurrence, normalized through
    the identity J_0 + 2 sum_k J_{2k} = 1."""
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    if kmax < lam + 40:
        raise ValueError(f"kmax = {kmax} too small for lam = {lam}; need >= lam + 40")
    vals = np.zeros(kmax + 1)
    if lam == 0.0:
        vals[0] = 1.0
        return vals

    start = kmax + max(20, int(math.sqrt(40.0 * kmax)))
    work = np.zeros(start + 1)
    jp = 0.0
    j = 1e-300
    work[start] = j
    for k in range(start, 0, -1):
        jm = (2.0 * k / lam) * j - jp
        jp, j = j, jm
        if abs(j) > 1e250:  # rescale to dodge overflow; normalization fixes it
            j *= 1e-250
            jp *= 1e-250
            work *= 1e-250
        work[k - 1] = j
    norm = work[0] + 2.0 * math.fsum(work[2::2].tolist())
    return work[: kmax + 1] / norm


def cosine_phase_norm(lam: float, p: float, kmax: int | None = None) -> float:
    """l^p coefficient norm of exp(i lam cos t): (sum_k |J_k(lam)|^p)^{1/p}
    over k in Z, using |J_{-k}| = |J_k|."""
    if not 1.0 <= p <= 2.0:
        raise ValueError(f"p must lie in [1, 2], got {p}")
    lam = abs(lam)
    if kmax is None:
        kmax = int(math.ceil(lam)) + 60
    vals = np.abs(bessel_coefficients(lam, kmax))
    mass = vals[0] ** p + 2.0 * math.fsum((vals[1:] ** p).tolist())
    return mass ** (1.0 / p)


def cosine_phase_tail(lam: float, cutoff: int, p: float, kmax: int | None = None) -> float:
    """l^p tail mass sum_{|k| >= cutoff} |J_k(lam)|^p for exp(i lam cos t)."""
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    lam = abs(lam)
    if kmax is None:
        kmax = max(int(math.ceil(lam)) + 60, cutoff + 60)
    vals = np.abs(bessel_coefficients(lam, kmax))
    return 2.0 * math.fsum((vals[cutoff:] ** p).tolist())
