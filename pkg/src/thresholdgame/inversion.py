"""Deterministic evaluation of the principal's error probability.

When both firms draw tests i.i.d. from a cdf ``G`` over [0, 1], the chance of
selecting the worse product is the double integral over the ordered-quality
triangle ``{0 <= y <= x <= 1}`` of ``(1 - G(x) + G(y))^2``.  The integrand is
smooth except along the cdf's breakpoints, so the triangle is partitioned by
every breakpoint in both coordinates and each cell is handled with adaptive
tensor Gauss-Legendre quadrature (a Duffy transform on the diagonal cells).

The module also provides the exact pairwise formula for deterministic
threshold lists, the optimal-value formula for correlated tests, the
decomposition of the error of an arbitrary cdf into linear and quadratic
coefficients of its mixture with the optimal cdf, and the cubic-in-deviation
lower bound those coefficients imply.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from thresholdgame.dists import MixedCdf
from thresholdgame.engine import InversionEstimate

__all__ = [
    "HybridCoefficients",
    "OPTIMAL_IID_VALUE",
    "SuboptimalityBound",
    "hybrid_decompose",
    "inversion_fixed",
    "inversion_iid",
    "optimal_value_correlated",
    "suboptimality_bound",
    "triangle_integral",
]

#: Error probability of the optimal i.i.d. rule (uniform tests on [1/4, 3/4]).
OPTIMAL_IID_VALUE = Fraction(5, 24)

_LEG_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _unit_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights rescaled to [0, 1]."""
    if order not in _LEG_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _LEG_CACHE[order] = (0.5 * (x + 1.0), 0.5 * w)
    return _LEG_CACHE[order]


def _rect(f, x0, x1, y0, y1, order):
    u, w = _unit_nodes(order)
    xs = x0 + (x1 - x0) * u
    ys = y0 + (y1 - y0) * u
    values = f(xs[:, None], ys[None, :])
    return (x1 - x0) * (y1 - y0) * float(np.einsum("i,j,ij->", w, w, values))


def _tri(f, x0, x1, order):
    # Duffy transform of the triangle {x0 <= y <= x <= x1}: x = x0 + h*xi,
    # y = x0 + h*xi*eta, Jacobian h^2 * xi.  Keeps the integrand smooth on a
    # square whenever it is smooth on the closed triangle.
    u, w = _unit_nodes(order)
    h = x1 - x0
    xs = x0 + h * u
    ys = x0 + h * u[:, None] * u[None, :]
    values = f(xs[:, None], ys)
    return h * h * float(np.einsum("i,j,ij->", w * u, w, values))


def _adaptive_rect(f, x0, x1, y0, y1, tol, order, depth):
    coarse = _rect(f, x0, x1, y0, y1, order)
    xm = 0.5 * (x0 + x1)
    ym = 0.5 * (y0 + y1)
    parts = [
        (x0, xm, y0, ym),
        (x0, xm, ym, y1),
        (xm, x1, y0, ym),
        (xm, x1, ym, y1),
    ]
    fine = sum(_rect(f, *p, order) for p in parts)
    if abs(fine - coarse) <= tol or depth <= 0:
        return fine
    return sum(_adaptive_rect(f, *p, tol / 4.0, order, depth - 1) for p in parts)


def _adaptive_tri(f, x0, x1, tol, order, depth):
    coarse = _tri(f, x0, x1, order)
    xm = 0.5 * (x0 + x1)
    fine = (
        _tri(f, x0, xm, order)
        + _tri(f, xm, x1, order)
        + _rect(f, xm, x1, x0, xm, order)
    )
    if abs(fine - coarse) <= tol or depth <= 0:
        return fine
    return (
        _adaptive_tri(f, x0, xm, tol / 3.0, order, depth - 1)
        + _adaptive_tri(f, xm, x1, tol / 3.0, order, depth - 1)
        + _adaptive_rect(f, xm, x1, x0, xm, tol / 3.0, order, depth - 1)
    )


def triangle_integral(f: Callable, breaks, tol: float = 1e-9, order: int = 20,
                      max_depth: int = 12) -> float:
    """Integrate ``f(x, y)`` over ``{0 <= y <= x <= 1}``.

    ``breaks`` lists interior smoothness boundaries; the domain is split at
    every break in both coordinates so each cell sees an analytic integrand.
    ``f`` must accept broadcastable numpy arrays.
    """
    edges = sorted({0.0, 1.0} | {float(b) for b in breaks if 0.0 < float(b) < 1.0})
    n_int = len(edges) - 1
    n_cells = n_int * (n_int + 1) // 2
    cell_tol = tol / max(n_cells, 1)
    total = 0.0
    for j in range(n_int):
        x0, x1 = edges[j], edges[j + 1]
        for i in range(j + 1):
            y0, y1 = edges[i], edges[i + 1]
            if i == j:
                total += _adaptive_tri(f, x0, x1, cell_tol, order, max_depth)
            else:
                total += _adaptive_rect(f, x0, x1, y0, y1, cell_tol, order, max_depth)
    return total


# ---------------------------------------------------------------------------
# The error functional
# ---------------------------------------------------------------------------


def inversion_iid(d: MixedCdf) -> InversionEstimate:
    """Error probability when both firms draw tests i.i.d. from ``d``."""

    def integrand(x, y):
        diff = 1.0 - d.cdf(x) + d.cdf(y)
        return diff * diff

    value = triangle_integral(integrand, d.breakpoints, tol=1e-9)
    return InversionEstimate(value=value, method="quadrature")


def inversion_fixed(thresholds) -> float | Fraction:
    """Expected fraction of inverted pairs for fixed, sorted thresholds.

    For each pair the principal errs exactly when both qualities land in the
    same band cut by the two thresholds, which happens with probability
    ``(lo^2 + (hi - lo)^2 + (1 - hi)^2) / 2``.  Exact for Fraction inputs.
    """
    seq = list(thresholds)
    n = len(seq)
    if n < 2:
        raise ValueError("need at least two thresholds")
    for t in seq:
        if not 0 <= t <= 1:
            raise ValueError("threshold outside [0, 1]")
    for lo, hi in zip(seq, seq[1:]):
        if lo > hi:
            raise ValueError("thresholds must be sorted ascending")
    total = 0
    for i in range(n):
        for j in range(i + 1, n):
            lo, hi = seq[i], seq[j]
            total += lo * lo + (hi - lo) * (hi - lo) + (1 - hi) * (1 - hi)
    n_pairs = n * (n - 1) // 2
    return total / (2 * n_pairs)


def optimal_value_correlated(n: int) -> Fraction:
    """Best achievable fraction of inverted pairs with n correlated tests."""
    n = int(n)
    if n < 2:
        raise ValueError("need at least two firms")
    return Fraction(5 * n - 4, 12 * (2 * n - 1))


# ---------------------------------------------------------------------------
# Hybrid decomposition and the deviation lower bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HybridCoefficients:
    """Coefficients of the error along the mixture path toward a cdf ``H``.

    Mixing the optimal cdf with ``H`` at weight ``t`` has error
    ``base_value + a_coeff * t + b_coeff * t^2``; at ``t = 1`` this is the
    error of ``H`` itself.  ``a_coeff >= 0`` and ``b_coeff >= 0`` for every
    cdf, which certifies the optimum.
    """

    a_coeff: float
    b_coeff: float
    base_value: float = float(OPTIMAL_IID_VALUE)

    @property
    def total(self) -> float:
        return self.base_value + self.a_coeff + self.b_coeff


class SuboptimalityBound(NamedTuple):
    epsilon: float
    lower_bound: float


def _optimal_cdf() -> MixedCdf:
    return MixedCdf.uniform(0.25, 0.75)


def hybrid_decompose(d: MixedCdf) -> HybridCoefficients:
    """Linear and quadratic error coefficients of ``d`` against the optimum."""
    g0 = _optimal_cdf()
    breaks = sorted(set(d.breakpoints) | set(g0.breakpoints))

    def cross(x, y):
        base = 1.0 - g0.cdf(x) + g0.cdf(y)
        delta = (g0.cdf(x) - d.cdf(x)) - (g0.cdf(y) - d.cdf(y))
        return base * delta

    def square(x, y):
        delta = (g0.cdf(x) - d.cdf(x)) - (g0.cdf(y) - d.cdf(y))
        return delta * delta

    a = 2.0 * triangle_integral(cross, breaks, tol=5e-10)
    b = triangle_integral(square, breaks, tol=5e-10)
    return HybridCoefficients(a_coeff=a, b_coeff=b)


def suboptimality_bound(d: MixedCdf, grid_size: int = 10_000) -> SuboptimalityBound:
    """Sup-distance of ``d`` from the optimal cdf and the error floor it implies.

    The scan covers a uniform grid plus every breakpoint of either cdf, with
    left limits at the breakpoints so jumps are measured from both sides.
    """
    g0 = _optimal_cdf()
    special = np.array(sorted(set(d.breakpoints) | set(g0.breakpoints)))
    grid = np.linspace(0.0, 1.0, grid_size + 1)
    pts = np.union1d(grid, special)
    eps = float(np.max(np.abs(g0.cdf(pts) - d.cdf(pts))))
    eps_left = float(np.max(np.abs(g0.left_limit(special) - d.left_limit(special))))
    eps = max(eps, eps_left)
    return SuboptimalityBound(eps, float(OPTIMAL_IID_VALUE) + eps**3 / 6.0)
