"""Evaluation of trigonometric polynomials on the torus T = R/Z.

Coefficient arrays are centred: ``coeffs[k + N]`` is the amplitude of
``exp(2 pi i k t)`` for ``|k| <= N``.
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from normctl.config import settings
from normctl.core.exceptions import NumericError

logger = logging.getLogger(__name__)

_MAX_CANDIDATES = 8


def degree_of(coeffs: np.ndarray) -> int:
    return (len(coeffs) - 1) // 2


def frequencies(degree: int) -> np.ndarray:
    return np.arange(-degree, degree + 1)


def grid_size(degree: int, oversampling: Optional[int] = None) -> int:
    oversampling = settings.grid_oversampling if oversampling is None else oversampling
    return max(oversampling * (degree + 1), 2 * degree + 1)


def grid_values(coeffs: np.ndarray, size: int) -> np.ndarray:
    """Values at the equispaced points j/size, j = 0..size-1, through one inverse FFT."""
    degree = degree_of(coeffs)
    buffer = np.zeros(size, dtype=complex)
    np.add.at(buffer, frequencies(degree) % size, coeffs)
    return size * np.fft.ifft(buffer)


def evaluate(coeffs: np.ndarray, t) -> np.ndarray:
    """Pointwise evaluation at arbitrary t."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = frequencies(degree_of(coeffs))
    return np.exp(2j * np.pi * np.outer(t, k)) @ coeffs


def _modulus_derivatives(coeffs: np.ndarray, t: float) -> Tuple[float, float, float]:
    """|f|^2 and its first two derivatives at t."""
    k = frequencies(degree_of(coeffs))
    w = 2j * np.pi * k
    e = np.exp(w * t)
    f0 = e @ coeffs
    f1 = (w * e) @ coeffs
    f2 = (w * w * e) @ coeffs
    g0 = abs(f0) ** 2
    g1 = 2.0 * (np.conj(f0) * f1).real
    g2 = 2.0 * (abs(f1) ** 2 + (np.conj(f0) * f2).real)
    return float(g0), float(g1), float(g2)


def _stationary_point(coeffs: np.ndarray, lo: float, hi: float, tol: float, max_iter: int) -> Optional[float]:
    """Safeguarded Newton on d|f|^2/dt inside a sign-changing bracket."""
    _, d_lo, _ = _modulus_derivatives(coeffs, lo)
    _, d_hi, _ = _modulus_derivatives(coeffs, hi)
    if d_lo == 0.0:
        return lo
    if d_hi == 0.0:
        return hi
    if math.copysign(1.0, d_lo) == math.copysign(1.0, d_hi):
        return None

    sign_lo = math.copysign(1.0, d_lo)
    t = 0.5 * (lo + hi)
    for _ in range(max_iter):
        _, d1, d2 = _modulus_derivatives(coeffs, t)
        if d1 == 0.0:
            return t
        if math.copysign(1.0, d1) == sign_lo:
            lo = t
        else:
            hi = t
        candidate = t - d1 / d2 if d2 != 0.0 else math.inf
        if not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        if abs(candidate - t) <= tol or hi - lo <= tol:
            return candidate
        t = candidate
    raise NumericError(
        "Sup-norm refinement did not converge",
        detail={"bracket": [lo, hi], "iterations": max_iter}
    )


def _local_extrema(values: np.ndarray, maximize: bool) -> List[int]:
    left = np.roll(values, 1)
    right = np.roll(values, -1)
    if maximize:
        mask = (values >= left) & (values >= right)
        order = np.argsort(-values)
    else:
        mask = (values <= left) & (values <= right)
        order = np.argsort(values)
    return [int(j) for j in order if mask[j]][:_MAX_CANDIDATES]


def refined_modulus(
    coeffs: np.ndarray,
    maximize: bool = True,
    oversampling: Optional[int] = None,
    tol: Optional[float] = None
) -> Tuple[float, float]:
    """Refined sup (or inf) of |f| over the torus.

    Returns ``(refined, grid)`` where ``grid`` is the extremum over the seed
    grid; the refined value is never worse than the grid value.
    """
    tol = settings.refine_tol if tol is None else tol
    degree = degree_of(coeffs)
    if degree == 0:
        value = float(abs(coeffs[0]))
        return value, value

    size = grid_size(degree, oversampling)
    squared = np.abs(grid_values(coeffs, size)) ** 2
    best = float(squared.max() if maximize else squared.min())
    grid_best = best
    h = 1.0 / size
    for j in _local_extrema(squared, maximize):
        root = _stationary_point(coeffs, (j - 1) * h, (j + 1) * h, tol, settings.refine_max_iter)
        if root is None:
            continue
        value, _, _ = _modulus_derivatives(coeffs, root)
        best = max(best, value) if maximize else min(best, value)
    return math.sqrt(max(best, 0.0)), math.sqrt(max(grid_best, 0.0))


def sup_modulus(coeffs: np.ndarray, oversampling: Optional[int] = None) -> float:
    return refined_modulus(coeffs, True, oversampling)[0]


def inf_modulus(coeffs: np.ndarray, oversampling: Optional[int] = None) -> float:
    return refined_modulus(coeffs, False, oversampling)[0]


def sup_ratio(numerator: np.ndarray, denominator: np.ndarray, oversampling: Optional[int] = None) -> float:
    """sup |p(t)/q(t)| for trigonometric polynomials p, q with q nonvanishing.

    Dense-grid seeding followed by bounded scalar maximisation around the
    best grid candidates.
    """
    degree = max(degree_of(numerator), degree_of(denominator))
    size = grid_size(degree, oversampling)
    ratio = np.abs(grid_values(numerator, size)) / np.abs(grid_values(denominator, size))
    best = float(ratio.max())
    if degree == 0:
        return best

    h = 1.0 / size

    def objective(t: float) -> float:
        return -float(abs(evaluate(numerator, t)[0]) / abs(evaluate(denominator, t)[0]))

    for j in _local_extrema(ratio, True):
        result = minimize_scalar(
            objective,
            bounds=((j - 1) * h, (j + 1) * h),
            method="bounded",
            options={"xatol": settings.refine_tol}
        )
        if result.success:
            best = max(best, -float(result.fun))
    return best
