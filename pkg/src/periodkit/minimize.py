"""Bounded scalar minimization on a sub-interval of (0, 1).

The strategy is deliberately conservative because nothing guarantees a
unique minimizer: a dense grid scan picks the best bracket, golden-section
search shrinks it, and a few guarded Newton steps polish the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScalarMinimizerConfig:
    abs_tol: float = 1e-12
    max_iters: int = 200
    bracket: tuple[float, float] = (1e-9, 1.0 - 1e-9)
    grid_points: int = 1024
    newton_steps: int = 3

    def __post_init__(self):
        lo, hi = self.bracket
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_iters < 1:
            raise DomainError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (0.0 < lo < hi < 1.0):
            raise DomainError(f"bracket must lie strictly inside (0, 1), got {self.bracket}")
        if self.grid_points < 3:
            raise DomainError("grid_points must be >= 3")


@dataclass(frozen=True)
class MinimizeResult:
    x: float
    fun: float
    iterations: int


def golden_section(f: Callable[[float], float], a: float, b: float,
                   tol: float = 1e-12, max_iters: int = 200) -> MinimizeResult:
    """Golden-section search for a minimum of ``f`` on ``[a, b]``.

    Raises ConvergenceError (with the best iterate attached) if the bracket
    is still wider than ``tol`` after ``max_iters`` shrink steps.
    """
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > tol:
        if it >= max_iters:
            best = MinimizeResult(x1, f1, it) if f1 <= f2 else MinimizeResult(x2, f2, it)
            raise ConvergenceError(
                f"golden-section bracket {b - a:.3e} > tol {tol:.1e} after {it} iterations",
                best=best)
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
        it += 1
    if f1 <= f2:
        return MinimizeResult(x1, f1, it)
    return MinimizeResult(x2, f2, it)


def _newton_polish(f, x, fx, lo, hi, steps):
    # central differences; a step is kept only if it lowers f
    for _ in range(steps):
        h = min(1e-5, 0.5 * min(x - lo, hi - x))
        if h <= 0:
            break
        fp, fm = f(x + h), f(x - h)
        d1 = (fp - fm) / (2 * h)
        d2 = (fp - 2 * fx + fm) / (h * h)
        if not (d2 > 0 and math.isfinite(d1)):
            break
        xn = x - d1 / d2
        if not (lo < xn < hi):
            break
        fn = f(xn)
        if fn < fx:
            x, fx = xn, fn
        else:
            break
    return x, fx


def minimize_unit_interval(f: Callable[[float], float], cfg: ScalarMinimizerConfig | None = None,
                           f_vec: Callable[[np.ndarray], np.ndarray] | None = None) -> MinimizeResult:
    """Minimize ``f`` over ``cfg.bracket``.

    ``f_vec`` is an optional vectorized version of ``f`` used for the grid scan.
    """
    cfg = cfg or ScalarMinimizerConfig()
    lo, hi = cfg.bracket
    grid = np.linspace(lo, hi, cfg.grid_points)
    vals = np.asarray(f_vec(grid)) if f_vec is not None else np.array([f(x) for x in grid])
    if not np.any(np.isfinite(vals)):
        raise ConvergenceError("objective is not finite anywhere on the scan grid")
    i = int(np.nanargmin(np.where(np.isfinite(vals), vals, np.inf)))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    res = golden_section(f, a, b, tol=cfg.abs_tol, max_iters=cfg.max_iters)
    x, fx = res.x, res.fun
    if vals[i] < fx:
        x, fx = float(grid[i]), float(vals[i])
    x, fx = _newton_polish(f, x, fx, lo, hi, cfg.newton_steps)
    return MinimizeResult(float(x), float(fx), res.iterations)
