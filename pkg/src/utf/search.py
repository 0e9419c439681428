"""One-dimensional search: dense grid followed by golden-section refinement."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
import numpy.typing as npt

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2

ScalarFn = Callable[[float], float]
VectorFn = Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]]


def golden_section_max(fn: ScalarFn, a: float, b: float, iters: int) -> tuple[float, float]:
    """
    Golden-section search for a maximum of ``fn`` on ``[a, b]``.

    Assumes a single local maximum inside the bracket; returns the best
    point evaluated, never one outside the bracket.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    best_x, best_y = a, fn(a)
    yb = fn(b)
    if yb > best_y:
        best_x, best_y = b, yb
    if h <= 0 or iters <= 0:
        return best_x, best_y

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = fn(c)
    yd = fn(d)

    for _ in range(iters):
        if yc > yd:
            b = d
            d, yd = c, yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = fn(c)
        else:
            a = c
            c, yc = d, yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = fn(d)

    for x, y in ((c, yc), (d, yd)):
        if y > best_y:
            best_x, best_y = x, y
    return best_x, best_y


def grid_then_golden(
        fn: VectorFn,
        lo: float,
        hi: float,
        grid_points: int,
        refine_iters: int,
) -> tuple[float, float]:
    """
    Maximize ``fn`` over ``[lo, hi]``.

    ``fn`` is evaluated on a dense grid first, which protects against local
    optima; the best cell and its neighbours are then refined with
    golden-section search. ``fn`` must accept numpy arrays.

    Args:
        fn: Vectorized objective
        lo: Lower end of the interval
        hi: Upper end of the interval
        grid_points: Number of grid samples
        refine_iters: Golden-section iterations on the best bracket

    Returns:
        Tuple of (argmax, max)
    """
    def scalar(x: float) -> float:
        return float(fn(np.array([x]))[0])

    if hi <= lo:
        return lo, scalar(lo)

    grid = np.linspace(lo, hi, grid_points)
    values = fn(grid)
    i = int(np.argmax(values))
    x_best, y_best = float(grid[i]), float(values[i])

    left = float(grid[max(i - 1, 0)])
    right = float(grid[min(i + 1, grid_points - 1)])
    x_ref, y_ref = golden_section_max(scalar, left, right, refine_iters)

    if y_ref > y_best:
        return x_ref, y_ref
    return x_best, y_best


def bisect_decreasing(
        fn: ScalarFn,
        target: float,
        lo: float,
        hi: float,
        iters: int,
) -> float:
    """
    Largest ``x`` in ``[lo, hi]`` with ``fn(x) >= target`` for nonincreasing ``fn``.

    The caller guarantees ``fn(lo) >= target``.
    """
    if fn(hi) >= target:
        return hi

    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fn(mid) >= target:
            lo = mid
        else:
            hi = mid

    return lo
