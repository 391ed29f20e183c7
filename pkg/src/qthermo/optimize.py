"""Bounded scalar maximization by golden-section search."""
from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10,
               max_iter: int = 500) -> tuple[float, float]:
    """Maximizer and maximum of a unimodal ``f`` on ``[a, b]``.

    Stops once the bracket is narrower than ``tol`` (absolute). A monotone
    ``f`` drives the result to within ``tol`` of the better endpoint.
    """
    if not b > a:
        raise ValueError(f"empty bracket [{a}, {b}]")
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x, fx = (c, fc) if fc >= fd else (d, fd)
    return x, fx


def golden_min(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10,
               max_iter: int = 500) -> tuple[float, float]:
    x, fx = golden_max(lambda z: -f(z), a, b, tol, max_iter)
    return x, -fx
