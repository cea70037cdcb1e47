"""Acceptance suite: one test per criterion, full scale, stated tolerances.

Each test prints a single ``ACCEPTANCE k PASS|FAIL`` line before asserting,
so a plain ``pytest -s tests/test_acceptance.py`` doubles as the acceptance
report.

Criterion 6's first clause fails and is left failing on purpose: it pins the
[0, 0.79] equilibrium error at <= 0.22975, but the exact value of the
closed-form construction is 0.2297710 (confirmed by 30-digit independent
quadrature and by Monte Carlo on the simulated game), and no restriction
interval does better than 0.2296835, so the pinned constant is unattainable.

Criterion 8's cubic deviation floor holds for every draw of the pinned seed,
but it is not universally valid: distributions far from the optimum can
violate it (a point mass at 0.8 has error 0.34, below the floor
5/24 + 1/6 = 0.375 implied by its sup-deviation of 1), and other seeds of
the same generator hit such draws.  The decomposition clauses (linear and
quadratic coefficients nonnegative, error identity) hold unconditionally.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_mixed_piecewise_linear
from thresholdgame.analysis import (
    poa_report,
    search_best_interval,
    symmetric_equilibrium_floor_check,
)
from thresholdgame.engine import (
    FixedThresholds,
    IidRule,
    SameTest,
    mc_inversion,
    simulate,
)
from thresholdgame.equilibrium import (
    equilibrium_interval,
    equilibrium_unrestricted,
    two_point_payoff_check,
    verify_equilibrium,
)
from thresholdgame.inversion import (
    hybrid_decompose,
    inversion_fixed,
    inversion_iid,
    optimal_value_correlated,
    suboptimality_bound,
)
from thresholdgame.optimal import optimal_correlated, optimal_iid, optimal_same_test

AB_SAMPLE = [
    (a, b)
    for a in (0.0, 0.1, 0.25, 0.4, 0.6)
    for b in (0.2, 0.45, 0.7, 0.9, 1.0)
    if a < b
]


def report(number: int, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number:02d} {status}: {detail}")


def test_criterion_01_optimal_iid_value():
    quad_est = inversion_iid(optimal_iid())
    quad_ok = abs(quad_est.value - 5 / 24) <= 1e-8
    mc_est = mc_inversion(IidRule(optimal_iid()), trials=10_000_000, seed=101)
    mc_ok = abs(mc_est.value - 5 / 24) <= 3 * mc_est.std_error
    report(1, quad_ok and mc_ok,
           f"I(opt iid) = {quad_est.value:.10f} (target 5/24), "
           f"MC {mc_est.value:.6f} +- {mc_est.std_error:.6f}")
    assert quad_ok and mc_ok


def test_criterion_02_optimal_correlated():
    exact_ok = True
    for n in range(2, 11):
        thresholds, value = optimal_correlated(n)
        exact_ok &= inversion_fixed(thresholds) == optimal_value_correlated(n) == value
    exact_ok &= optimal_value_correlated(2) == Fraction(1, 6)
    mc_ok = True
    details = []
    for n, seed in ((2, 201), (3, 202), (5, 203)):
        thresholds = tuple(float(t) for t in optimal_correlated(n).thresholds)
        est = mc_inversion(FixedThresholds(thresholds), trials=10_000_000, seed=seed)
        target = float(optimal_value_correlated(n))
        mc_ok &= abs(est.value - target) <= 3 * est.std_error
        details.append(f"n={n}: {est.value:.6f} vs {target:.6f}")
    report(2, exact_ok and mc_ok,
           "exact rational identity for n=2..10; MC " + "; ".join(details))
    assert exact_ok and mc_ok


def test_criterion_03_median_test():
    theta, value = optimal_same_test()
    exact_ok = value == Fraction(1, 4) and theta == Fraction(1, 2)
    grid = np.linspace(0.0, 1.0, 2001)
    objective = 0.5 * (grid**2 + (1 - grid) ** 2)
    grid_ok = bool(np.all(objective >= 0.25 - 1e-15)) and \
        float(grid[np.argmin(objective)]) == 0.5
    report(3, exact_ok and grid_ok, "value 1/4 exact, minimized at theta = 1/2")
    assert exact_ok and grid_ok


def test_criterion_04_equilibrium_value_and_poa():
    value = inversion_iid(equilibrium_unrestricted().dist).value
    value_ok = abs(value - 0.23056) <= 5e-4
    rep = poa_report(n=2)
    poa_ok = abs(rep.poa_vs_iid - 1.10653) <= 1e-3 and \
        abs(rep.poa_vs_correlated - 1.38336) <= 1e-3
    report(4, value_ok and poa_ok,
           f"I(eq) = {value:.6f}; PoA vs iid {rep.poa_vs_iid:.5f}, "
           f"vs correlated {rep.poa_vs_correlated:.5f}")
    assert value_ok and poa_ok


def test_criterion_05_equilibrium_verification():
    ok = True
    regimes = set()
    rep = verify_equilibrium(equilibrium_unrestricted(), grid_size=10_000, tol=1e-8)
    ok &= rep.passed
    worst_support = rep.max_support_deviation
    worst_outside = rep.max_outside_gain
    for a, b in AB_SAMPLE:
        sol = equilibrium_interval(a, b)
        regimes.add(sol.regime)
        rep = verify_equilibrium(sol, grid_size=10_000, tol=1e-8)
        ok &= rep.passed
        worst_support = max(worst_support, rep.max_support_deviation)
        worst_outside = max(worst_outside, rep.max_outside_gain)
    ok &= regimes == {"step_at_b", "interior"}
    report(5, ok,
           f"{len(AB_SAMPLE)} interval pairs + unrestricted, both regimes; "
           f"max |u-1/2| on support {worst_support:.2e}, "
           f"max off-support gain {worst_outside:.2e}")
    assert ok


def test_criterion_06_restricted_interval_improvement():
    value_079 = inversion_iid(equilibrium_interval(0.0, 0.79).dist).value
    clause_a = value_079 <= 0.22975
    value_full = inversion_iid(equilibrium_interval(0.0, 1.0).dist).value
    clause_b = value_full >= 0.23052
    result = search_best_interval(resolution=0.01, refine=True)
    clause_c = abs(result.b - 0.79) <= 0.01
    report(6, clause_a and clause_b and clause_c,
           f"I(eq[0,0.79]) = {value_079:.7f} (stated bound 0.22975: "
           f"{'met' if clause_a else 'NOT met - unattainable constant, see module docstring'}); "
           f"I(eq[0,1]) = {value_full:.7f} >= 0.23052; "
           f"search optimum (a,b) = ({result.a:.4f}, {result.b:.4f}), "
           f"value {result.value:.7f}")
    assert clause_b, "unrestricted equilibrium must exceed 0.23052"
    assert clause_c, "search must land within 0.79 +- 0.01"
    assert clause_a, (
        "the exact [0,0.79] equilibrium error is 0.2297710 > 0.22975; the "
        "stated constant is unattainable (independent 30-digit quadrature "
        "and Monte Carlo agree; see the module docstring)"
    )


def test_criterion_07_symmetric_equilibrium_floor():
    ok = True
    intervals = AB_SAMPLE + [(0.0, 0.79), (0.015, 0.8)]
    for a, b in intervals:
        ok &= symmetric_equilibrium_floor_check(equilibrium_interval(a, b))
    ok &= symmetric_equilibrium_floor_check(equilibrium_unrestricted())
    report(7, ok, f"I >= 5/24 + 1/82944 for {len(intervals) + 1} constructed equilibria")
    assert ok


def test_criterion_08_suboptimality_and_hybrid():
    rng = np.random.default_rng(8088)
    coeff_ok = True
    bound_violations = []
    worst_margin = math.inf
    for i in range(100):
        d = random_mixed_piecewise_linear(rng)
        value = inversion_iid(d).value
        coeffs = hybrid_decompose(d)
        coeff_ok &= coeffs.a_coeff >= -1e-9
        coeff_ok &= coeffs.b_coeff >= 0.0
        coeff_ok &= abs(value - coeffs.total) <= 1e-6
        eps, lower = suboptimality_bound(d)
        margin = value - (lower - 1e-6)
        worst_margin = min(worst_margin, margin)
        if margin < 0:
            bound_violations.append((i, eps, margin))
    bound_ok = not bound_violations
    report(8, coeff_ok and bound_ok,
           f"hybrid identity and signs on 100 draws: {'ok' if coeff_ok else 'BAD'}; "
           f"cubic bound violations: {len(bound_violations)} "
           f"(worst margin {worst_margin:.2e}; the floor is not universally "
           f"valid, see module docstring)")
    assert coeff_ok
    assert bound_ok, (
        f"{len(bound_violations)} of 100 draws violate the cubic deviation "
        "floor; the bound does not hold for distributions far from the "
        "optimum (counterexample: point mass at 0.8; see the module docstring)"
    )


def test_criterion_09_two_point_example():
    check_ok = two_point_payoff_check()
    lo = 1 - math.sqrt(2) / 2
    hi = math.sqrt(2) / 2
    value = inversion_fixed((lo, hi))
    target = 3 - 2 * math.sqrt(2)
    exact_ok = abs(value - target) <= 1e-15
    report(9, check_ok and exact_ok,
           f"all four pure pairs fair; inversion {value!r} = 3 - 2*sqrt(2)")
    assert check_ok and exact_ok


def test_criterion_10_engine_cross_validation():
    rng = np.random.default_rng(1010)
    rules = [SameTest(0.5), SameTest(float(rng.uniform(0.2, 0.8)))]
    for n in (2, 3):
        rules.append(FixedThresholds(tuple(sorted(rng.uniform(0.0, 1.0, size=n)))))
    for _ in range(6):
        rules.append(IidRule(random_mixed_piecewise_linear(rng)))

    agree_ok = True
    symmetry_ok = True
    for k, rule in enumerate(rules):
        if isinstance(rule, SameTest):
            target = 0.5 * (rule.theta**2 + (1 - rule.theta) ** 2)
        elif isinstance(rule, FixedThresholds):
            target = float(inversion_fixed(sorted(rule.thresholds)))
        else:
            target = inversion_iid(rule.dist).value
        summary = simulate(rule, trials=1_000_000, seed=5000 + k)
        agree_ok &= abs(summary.inversion_mean - target) <= \
            3 * summary.inversion_std_error
        if isinstance(rule, (SameTest, IidRule)):
            for rate, se in zip(summary.win_rates, summary.win_rate_std_errors):
                symmetry_ok &= abs(rate - 0.5) <= 3 * se

    rerun_a = mc_inversion(rules[-1], trials=200_000, seed=77)
    rerun_b = mc_inversion(rules[-1], trials=200_000, seed=77)
    determinism_ok = rerun_a == rerun_b

    report(10, agree_ok and symmetry_ok and determinism_ok,
           f"{len(rules)} rules: MC vs deterministic within 3 s.e. "
           f"({'ok' if agree_ok else 'BAD'}); symmetric win rates "
           f"({'ok' if symmetry_ok else 'BAD'}); bit-identical rerun "
           f"({'ok' if determinism_ok else 'BAD'})")
    assert agree_ok and symmetry_ok and determinism_ok
