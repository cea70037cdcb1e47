"""Derivative-free golden-section refinement on a bracket."""

from __future__ import annotations

import math

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo: float, hi: float, iterations: int = 60):
    """Approximate maximizer of ``f`` on [lo, hi]; returns ``(x, f(x))``.

    Standard interval-shrinking scheme; after the loop the best evaluated
    point (including the original endpoints) is returned, so the result never
    underestimates the bracket endpoints.
    """
    a, b = float(lo), float(hi)
    best_x, best_f = a, f(a)
    fb = f(b)
    if fb > best_f:
        best_x, best_f = b, fb
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iterations):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
    for x, fx in ((x1, f1), (x2, f2)):
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def golden_section_min(f, lo: float, hi: float, iterations: int = 60):
    x, neg = golden_section_max(lambda t: -f(t), lo, hi, iterations)
    return x, -neg
