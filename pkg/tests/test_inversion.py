"""Tests for the error-probability functional and its decompositions."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import dblquad, quad

from conftest import random_mixed_piecewise_linear
from thresholdgame.dists import MixedCdf
from thresholdgame.engine import IidRule, mc_inversion
from thresholdgame.equilibrium import equilibrium_unrestricted
from thresholdgame.inversion import (
    hybrid_decompose,
    inversion_fixed,
    inversion_iid,
    optimal_value_correlated,
    suboptimality_bound,
    triangle_integral,
)

# Reference value computed independently at 30-digit precision by nested
# tanh-sinh quadrature of the closed-form equilibrium cdf.
EQ_INVERSION_REFERENCE = 0.23052615844150636


class TestTriangleIntegral:
    def test_constant(self):
        assert triangle_integral(lambda x, y: np.broadcast_arrays(x, y)[0] * 0 + 1.0,
                                 ()) == pytest.approx(0.5, abs=1e-12)

    def test_polynomial(self):
        # int_0^1 int_0^x x^2 y dy dx = int x^4/2 = 1/10
        assert triangle_integral(lambda x, y: x * x * y, (0.3, 0.7)) == pytest.approx(
            0.1, abs=1e-12
        )


class TestInversionIid:
    def test_optimal_uniform(self):
        est = inversion_iid(MixedCdf.uniform(0.25, 0.75))
        assert est.method == "quadrature"
        assert est.std_error == 0.0 and est.trials == 0
        assert est.value == pytest.approx(5 / 24, abs=1e-8)

    @pytest.mark.parametrize("theta", [0.0, 0.25, 0.5, 0.8, 1.0])
    def test_step_closed_form(self, theta):
        est = inversion_iid(MixedCdf.step(theta))
        assert est.value == pytest.approx(
            0.5 * (theta**2 + (1 - theta) ** 2), abs=1e-9
        )

    def test_unrestricted_equilibrium(self):
        est = inversion_iid(equilibrium_unrestricted().dist)
        assert est.value == pytest.approx(EQ_INVERSION_REFERENCE, abs=1e-7)
        assert abs(est.value - 0.23056) < 5e-4

    def test_against_scipy_dblquad(self):
        d = MixedCdf.piecewise_linear([(0.0, 0.0), (0.2, 0.1), (0.6, 0.8), (1.0, 1.0)])

        def integrand(y, x):
            return (1.0 - d.cdf(x) + d.cdf(y)) ** 2

        reference, err = dblquad(integrand, 0, 1, 0, lambda x: x,
                                 epsabs=1e-8, epsrel=1e-8)
        assert inversion_iid(d).value == pytest.approx(reference, abs=max(1e-8, 10 * err))

    def test_against_monte_carlo(self):
        rng = np.random.default_rng(8)
        d = random_mixed_piecewise_linear(rng)
        quad_value = inversion_iid(d).value
        est = mc_inversion(IidRule(d), trials=1_000_000, seed=21)
        assert abs(quad_value - est.value) < 3 * est.std_error


class TestInversionFixed:
    def test_optimal_pair_exact(self):
        value = inversion_fixed((Fraction(1, 3), Fraction(2, 3)))
        assert value == Fraction(1, 6)

    def test_two_point_example(self):
        lo = 1 - math.sqrt(2) / 2
        hi = math.sqrt(2) / 2
        assert inversion_fixed((lo, hi)) == pytest.approx(3 - 2 * math.sqrt(2), rel=1e-14)

    def test_degenerate_pair_is_median_test(self):
        assert inversion_fixed((0.5, 0.5)) == pytest.approx(0.25, abs=1e-15)

    @pytest.mark.parametrize("theta", [0.1, 0.4, 0.75])
    def test_equal_pair_matches_step_iid(self, theta):
        fixed = inversion_fixed((theta, theta))
        step = inversion_iid(MixedCdf.step(theta)).value
        assert fixed == pytest.approx(step, abs=1e-9)

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            inversion_fixed((0.7, 0.3))

    def test_rejects_short_or_out_of_range(self):
        with pytest.raises(ValueError):
            inversion_fixed((0.5,))
        with pytest.raises(ValueError):
            inversion_fixed((0.2, 1.4))


class TestOptimalValueCorrelated:
    def test_two_firms(self):
        assert optimal_value_correlated(2) == Fraction(1, 6)

    def test_three_firms(self):
        assert optimal_value_correlated(3) == Fraction(11, 60)

    def test_limit_is_iid_optimum(self):
        assert float(optimal_value_correlated(10**9)) == pytest.approx(5 / 24, abs=1e-8)

    def test_rejects_single_firm(self):
        with pytest.raises(ValueError):
            optimal_value_correlated(1)


def _upsilon(z: float) -> float:
    """Running integral of the optimal cdf, piecewise closed form."""
    if z < 0.25:
        return 0.0
    if z <= 0.75:
        return (z - 0.25) ** 2
    return z - 0.5


def _hybrid_linear_oracle(d: MixedCdf) -> float:
    # The linear coefficient reduces to 1/8 minus the mean of
    # c(z) = 2*(z*Upsilon(1-z) + (1-z)*Upsilon(z)) under d.
    def c(z):
        return 2.0 * (z * _upsilon(1 - z) + (1 - z) * _upsilon(z))

    mean = sum(mass * c(loc) for loc, mass in d.atoms)
    for piece in d.pieces:
        density = piece.density(0.5 * (piece.lo + piece.hi))
        if density == 0.0:
            continue
        kinks = [p for p in (0.25, 0.75) if piece.lo < p < piece.hi]
        part, _ = quad(lambda t: c(t) * float(piece.density(t)), piece.lo, piece.hi,
                       points=kinks or None, limit=200)
        mean += part
    return 0.125 - mean


def _hybrid_quadratic_oracle(d: MixedCdf) -> float:
    # B reduces to the variance of H = G_opt - d under the uniform measure.
    g0 = MixedCdf.uniform(0.25, 0.75)
    pts = sorted(set(d.breakpoints) | {0.25, 0.75}) [1:-1]

    def h(t):
        return g0.cdf(float(t)) - d.cdf(float(t))

    m2, _ = quad(lambda t: h(t) ** 2, 0, 1, points=pts, limit=200)
    m1, _ = quad(h, 0, 1, points=pts, limit=200)
    return m2 - m1 * m1


class TestHybridDecompose:
    def test_optimum_has_zero_coefficients(self):
        coeffs = hybrid_decompose(MixedCdf.uniform(0.25, 0.75))
        assert abs(coeffs.a_coeff) < 1e-9
        assert abs(coeffs.b_coeff) < 1e-9

    def test_median_step_consistency(self):
        # A is exactly 0 here (the step sits inside [1/4, 3/4]); allow the
        # quadrature's floating-point dust.
        coeffs = hybrid_decompose(MixedCdf.step(0.5))
        assert coeffs.a_coeff >= -1e-9
        assert coeffs.b_coeff >= 0.0
        assert coeffs.total == pytest.approx(0.25, abs=1e-6)

    @pytest.mark.parametrize("seed", range(6))
    def test_random_cdfs_identity_and_signs(self, seed):
        rng = np.random.default_rng(1000 + seed)
        d = random_mixed_piecewise_linear(rng)
        coeffs = hybrid_decompose(d)
        assert coeffs.a_coeff >= -1e-9
        assert coeffs.b_coeff >= 0.0
        assert inversion_iid(d).value == pytest.approx(coeffs.total, abs=1e-6)

    @pytest.mark.parametrize("seed", range(4))
    def test_against_one_dimensional_oracles(self, seed):
        # The double integrals collapse to closed 1-d reductions; both
        # computations must agree.
        rng = np.random.default_rng(2000 + seed)
        d = random_mixed_piecewise_linear(rng)
        coeffs = hybrid_decompose(d)
        assert coeffs.a_coeff == pytest.approx(_hybrid_linear_oracle(d), abs=1e-7)
        assert coeffs.b_coeff == pytest.approx(_hybrid_quadratic_oracle(d), abs=1e-7)


class TestSuboptimalityBound:
    def test_optimum_itself(self):
        eps, bound = suboptimality_bound(MixedCdf.uniform(0.25, 0.75))
        assert eps == 0.0
        assert bound == pytest.approx(5 / 24, abs=1e-12)

    def test_unrestricted_equilibrium_deviation(self):
        # The sup-deviation is attained at 3/4 where the optimal cdf hits 1:
        # eps = 1 - T(3/4), well above the 1/24 floor for equilibria.
        eps, bound = suboptimality_bound(equilibrium_unrestricted().dist)
        t34 = 0.5 * (1 + 0.5 / math.sqrt(0.625))
        assert eps == pytest.approx(1 - t34, abs=1e-6)
        assert eps >= 1 / 24
        assert bound >= 5 / 24 + 1 / 82944
        assert inversion_iid(equilibrium_unrestricted().dist).value >= bound - 1e-6

    def test_step_at_zero(self):
        d = MixedCdf.step(0.0)
        eps, bound = suboptimality_bound(d)
        assert eps == pytest.approx(1.0, abs=1e-12)
        assert bound == pytest.approx(5 / 24 + 1 / 6, abs=1e-12)
        assert inversion_iid(d).value >= bound - 1e-6
