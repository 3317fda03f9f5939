"""Adaptive Gauss-Legendre quadrature with recursive bisection."""

from __future__ import annotations

from typing import Callable

import numpy as np

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(12)

MAX_DEPTH = 60
# panels that agree to a few ulps cannot be improved by further bisection
_ROUNDOFF = 64 * np.finfo(float).eps


def _panel(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * float(np.dot(_WEIGHTS, f(mid + half * _NODES)))


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
) -> float:
    """Integrate a vectorized ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    A panel is accepted when its 12-point estimate agrees with the sum of the
    estimates on its two halves; otherwise both halves are refined with half
    the tolerance each.
    """
    if a == b:
        return 0.0
    if b < a:
        return -integrate(f, b, a, tol)

    total = 0.0
    # explicit stack keeps deep refinement near endpoint singularities cheap
    stack = [(a, b, _panel(f, a, b), tol, 0)]
    while stack:
        lo, hi, whole, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid)
        right = _panel(f, mid, hi)
        err = abs(left + right - whole)
        if err <= eps or err <= _ROUNDOFF * abs(left + right) or depth >= MAX_DEPTH or mid in (lo, hi):
            total += left + right
        else:
            stack.append((mid, hi, right, 0.5 * eps, depth + 1))
            stack.append((lo, mid, left, 0.5 * eps, depth + 1))
    return total
