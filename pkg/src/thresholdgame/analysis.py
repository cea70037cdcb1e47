"""Headline comparisons across the five test-assignment regimes.

Assembles the number line of principal error probabilities: optimal
correlated tests, optimal i.i.d. tests, the best interval-restricted
equilibrium, the unrestricted equilibrium, and the single-test baseline, plus
the Price-of-Anarchy ratios between the equilibrium and the principal's
optima.  Also searches over restriction intervals [a, b] for the equilibrium
the principal likes best.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from thresholdgame._golden import golden_section_min
from thresholdgame.equilibrium import (
    EquilibriumSolution,
    equilibrium_interval,
    verify_equilibrium,
)
from thresholdgame.inversion import OPTIMAL_IID_VALUE, inversion_iid, optimal_value_correlated

__all__ = [
    "EQUILIBRIUM_FLOOR",
    "PoaReport",
    "SearchResult",
    "poa_report",
    "search_best_interval",
    "symmetric_equilibrium_floor_check",
]

#: Error floor for every symmetric equilibrium, on any restriction set.
EQUILIBRIUM_FLOOR = Fraction(5, 24) + Fraction(1, 82944)

#: Best known restriction interval (from the grid search; see Fig-1 ordering).
BEST_KNOWN_INTERVAL = (0.0, 0.79)


@dataclass(frozen=True)
class SearchResult:
    a: float
    b: float
    value: float

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "value": self.value}


@dataclass(frozen=True)
class PoaReport:
    """Fig-1 style five-regime comparison for ``n`` firms."""

    n: int
    same_test: float
    correlated: float
    iid_opt: float
    eq_restricted_best: SearchResult
    eq_unrestricted: float
    poa_vs_iid: float
    poa_vs_correlated: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "same_test": self.same_test,
            "correlated": self.correlated,
            "iid_opt": self.iid_opt,
            "eq_restricted_best": self.eq_restricted_best.to_dict(),
            "eq_unrestricted": self.eq_unrestricted,
            "poa_vs_iid": self.poa_vs_iid,
            "poa_vs_correlated": self.poa_vs_correlated,
        }


@lru_cache(maxsize=None)
def _interval_inversion(a: float, b: float) -> float:
    """Error probability of the [a, b] equilibrium, verified then cached."""
    sol = equilibrium_interval(a, b)
    report = verify_equilibrium(sol, grid_size=1000, tol=1e-8)
    if not report.passed:
        raise RuntimeError(
            f"constructed equilibrium on [{a}, {b}] failed verification: {report}"
        )
    return inversion_iid(sol.dist).value


def search_best_interval(a_grid=None, b_grid=None, refine: bool = True,
                         resolution: float = 0.01) -> SearchResult:
    """Minimize the equilibrium error probability over intervals [a, b].

    Coarse scan over the mixed-equilibrium region ``(1 - a) * b > 1/2`` (plus
    the step-regime boundary cells) followed by coordinate-wise
    golden-section refinement around the best cell.
    """
    if a_grid is None:
        a_grid = np.arange(0.0, 1.0, resolution)
    if b_grid is None:
        b_grid = np.arange(resolution, 1.0 + resolution / 2.0, resolution)
    a_grid = np.asarray(a_grid, dtype=float)
    b_grid = np.asarray(b_grid, dtype=float)

    best = (np.inf, 0.0, 1.0)
    for a in a_grid:
        interior = [b for b in b_grid if b > a and (1.0 - a) * b > 0.5]
        boundary = [b for b in b_grid if b > a and (1.0 - a) * b <= 0.5]
        candidates = interior + boundary[-1:]
        for b in candidates:
            value = _interval_inversion(round(float(a), 12), round(float(b), 12))
            if value < best[0]:
                best = (value, float(a), float(b))

    value, a_star, b_star = best
    if refine:
        for _ in range(2):
            b_lo = max(b_star - resolution, a_star + 1e-6)
            b_hi = min(b_star + resolution, 1.0)
            b_star, value = golden_section_min(
                lambda b: _interval_inversion(a_star, round(float(b), 12)),
                b_lo, b_hi, iterations=40,
            )
            a_lo = max(a_star - resolution, 0.0)
            a_hi = min(a_star + resolution, b_star - 1e-6)
            if a_hi > a_lo:
                a_star, value = golden_section_min(
                    lambda a: _interval_inversion(round(float(a), 12), b_star),
                    a_lo, a_hi, iterations=40,
                )
    return SearchResult(a=a_star, b=b_star, value=value)


def poa_report(n: int = 2, restricted_interval=BEST_KNOWN_INTERVAL,
               run_search: bool = False, resolution: float = 0.01) -> PoaReport:
    """Assemble the five-regime comparison and the Price-of-Anarchy ratios.

    ``restricted_interval`` pins the restricted-equilibrium entry; pass
    ``run_search=True`` to find it by grid search instead.
    """
    n = int(n)
    if n < 2:
        raise ValueError("need at least two firms")
    correlated = float(optimal_value_correlated(n))
    iid_opt = float(OPTIMAL_IID_VALUE)
    eq_unrestricted = _interval_inversion(0.0, 1.0)
    if run_search:
        restricted = search_best_interval(resolution=resolution)
    else:
        a, b = restricted_interval
        restricted = SearchResult(a=float(a), b=float(b),
                                  value=_interval_inversion(float(a), float(b)))
    return PoaReport(
        n=n,
        same_test=0.25,
        correlated=correlated,
        iid_opt=iid_opt,
        eq_restricted_best=restricted,
        eq_unrestricted=eq_unrestricted,
        poa_vs_iid=eq_unrestricted / iid_opt,
        poa_vs_correlated=eq_unrestricted / correlated,
    )


def symmetric_equilibrium_floor_check(sol: EquilibriumSolution,
                                      slack: float = 1e-9) -> bool:
    """True when the equilibrium's error respects the symmetric floor."""
    return inversion_iid(sol.dist).value >= float(EQUILIBRIUM_FLOOR) - slack
