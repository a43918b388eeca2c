"""Muller's method for complex roots of analytic functions."""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable

from .errors import NoConvergence


@dataclass(frozen=True)
class MullerResult:
    root: complex
    iterations: int
    residual: float


def muller(f: Callable[[complex], complex], x0: complex, x1: complex, x2: complex,
           ftol: float = 1e-10, xtol: float = 1e-14, max_iter: int = 100) -> MullerResult:
    """Find a root of ``f`` from three starting points.

    Each step fits a parabola through the last three iterates and moves to its
    root closer to the newest point. Converged when ``|f(x)| <= ftol``, or when
    the step drops below ``xtol * max(1, |x|)`` with ``|f(x)| <= ftol`` still
    required.

    Raises:
        NoConvergence: if neither criterion is met within ``max_iter`` steps.
    """
    x0, x1, x2 = complex(x0), complex(x1), complex(x2)
    f0, f1, f2 = f(x0), f(x1), f(x2)
    for it in range(1, max_iter + 1):
        if abs(f2) <= ftol:
            return MullerResult(x2, it - 1, abs(f2))
        h1 = x1 - x0
        h2 = x2 - x1
        if h1 == 0 or h2 == 0 or h1 + h2 == 0:
            break
        d1 = (f1 - f0) / h1
        d2 = (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = cmath.sqrt(b * b - 4 * a * f2)
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        if den == 0:
            # flat parabola: nudge instead of dividing by zero
            step = (abs(h2) or 1e-3) * (1 + 1j)
        else:
            step = -2 * f2 / den
        x3 = x2 + step
        f3 = f(x3)
        if not cmath.isfinite(f3):
            break
        x0, x1, x2 = x1, x2, x3
        f0, f1, f2 = f1, f2, f3
        if abs(step) <= xtol * max(1.0, abs(x3)):
            if abs(f3) <= ftol:
                return MullerResult(x3, it, abs(f3))
            break
    raise NoConvergence(x2)
