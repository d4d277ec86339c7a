import cmath
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from resonancelab.dispersion_geometry import DispersionRelation
from resonancelab.errors import HypothesisError, LabConfigurationError
from resonancelab.oscillatory import (
    C0,
    C_MINUS,
    C_PLUS,
    LEADING_CASES,
    BumpAmplitude,
    OscIntegralSpec,
    compare_leading_term,
    fresnel_g1,
    fresnel_g2,
    g1_asymptotic,
    g2_asymptotic,
    leading_term,
    oracle_integral,
    quadrature_constants,
    reference_spec,
)
from resonancelab.rate_lab import fit_decay

SQUARE = DispersionRelation((0.0, 0.0, 1.0))
LINEAR = DispersionRelation((0.0, 1.0))
UNIT_BUMP = BumpAmplitude(0.0, 1.0)
EXPANSION_X = np.geomspace(10.0, 100.0, 12)


class TestConstants:
    def test_quadrature_matches_closed_forms(self):
        constants = quadrature_constants()
        assert abs(constants.C0 - (1 + 1j) * math.sqrt(math.pi / 2)) < 1e-6
        assert abs(constants.C_plus - C_PLUS) < 1e-6
        assert abs(constants.C_minus - C_MINUS) < 1e-6

    def test_relations(self):
        assert C_PLUS + C_MINUS == pytest.approx(math.sqrt(math.pi / 2))
        assert C0 == pytest.approx(2 * C_PLUS)


class TestG1:
    def test_value_at_zero(self):
        assert fresnel_g1(0.0) == pytest.approx(C_PLUS, abs=1e-12)

    @pytest.mark.parametrize("x", [0.5, 2.0, 10.0])
    def test_reflection(self, x):
        assert fresnel_g1(x) + fresnel_g1(-x) == pytest.approx(C0, abs=1e-8)

    def test_reflection_random(self):
        x = np.random.default_rng(3).uniform(-20.0, 20.0, 50)
        assert_allclose(fresnel_g1(x) + fresnel_g1(-x), C0, atol=1e-8)

    def test_large_argument(self):
        assert abs(fresnel_g1(10.0) + cmath.exp(100j) / 20j) <= 1e-2

    def test_derivative_identity(self):
        x = 1.3

        def defect(h):
            slope = (fresnel_g1(x + h) - fresnel_g1(x - h)) / (2 * h)
            return abs(slope + cmath.exp(1j * x * x))

        ratio = defect(1e-2) / defect(1e-3)
        assert 50.0 < ratio < 200.0

    def test_expansion_remainder_slope(self):
        remainder = np.abs(fresnel_g1(EXPANSION_X) - g1_asymptotic(EXPANSION_X))
        assert fit_decay(EXPANSION_X, remainder).fitted_exponent <= -1.8

    def test_two_term_expansion_is_closer(self):
        one = abs(fresnel_g1(20.0) - g1_asymptotic(20.0))
        two = abs(fresnel_g1(20.0) - g1_asymptotic(20.0, terms=2))
        assert two < one

    def test_argument_range(self):
        with pytest.raises(LabConfigurationError):
            fresnel_g1(2e4)


class TestG2:
    def test_continuity_at_zero(self):
        assert abs(fresnel_g2(0.0) - fresnel_g2(1e-4)) <= 1e-2

    def test_continuity_across_branch_switch(self):
        assert abs(fresnel_g2(-2.0) - fresnel_g2(-2.0 - 1e-6)) < 1e-4

    def test_value_at_zero(self):
        # G2(0) = int_0^inf exp(i s^2) / sqrt(s) ds = Gamma(1/4) exp(i pi / 8) / 2
        expected = math.gamma(0.25) * cmath.exp(1j * math.pi / 8) / 2
        assert fresnel_g2(0.0) == pytest.approx(expected, abs=1e-8)

    def test_positive_expansion(self):
        x = 50.0
        leading = C_PLUS * cmath.exp(1j * x * x) * math.sqrt(2 / x)
        assert abs(fresnel_g2(x) - leading) <= 0.05 * x ** (-5 / 6)

    @pytest.mark.parametrize("sign, threshold", [(1.0, -0.7), (-1.0, -0.6)])
    def test_expansion_remainder_slopes(self, sign, threshold):
        x = sign * EXPANSION_X
        remainder = np.abs(fresnel_g2(x) - g2_asymptotic(x))
        assert fit_decay(EXPANSION_X, remainder).fitted_exponent <= threshold

    def test_expansion_undefined_at_zero(self):
        with pytest.raises(LabConfigurationError):
            g2_asymptotic(0.0)


class TestOracle:
    def test_zero_amplitude(self):
        spec = OscIntegralSpec(SQUARE, BumpAmplitude(0.0, 1.0, 0.0), 50.0)
        assert oracle_integral(spec) == 0j

    def test_endpoint_with_inverse_square_root(self):
        spec = OscIntegralSpec(LINEAR, UNIT_BUMP, 400.0, "inv_sqrt_sigma")
        assert abs(oracle_integral(spec) - C0 / 20) <= 0.01

    def test_halving_panels_is_stable(self):
        spec = OscIntegralSpec(SQUARE, BumpAmplitude(0.5, 1.0), 300.0)
        assert abs(oracle_integral(spec) - oracle_integral(spec, halve=True)) <= 1e-9

    def test_conjugate_phase(self):
        spec = OscIntegralSpec(SQUARE, BumpAmplitude(0.3, 1.0), 120.0, "inv_sqrt_sigma")
        flipped = OscIntegralSpec(
            DispersionRelation((0.0, 0.0, -1.0)), BumpAmplitude(0.3, 1.0), 120.0, "inv_sqrt_sigma"
        )
        assert abs(oracle_integral(flipped) - oracle_integral(spec).conjugate()) <= 1e-9

    def test_gaussian_closed_form(self):
        # int_0^inf exp(i t s^2) ds restricted by a wide amplitude is near C_plus / sqrt(t)
        spec = OscIntegralSpec(SQUARE, BumpAmplitude(0.0, 3.0), 1e4)
        assert oracle_integral(spec) == pytest.approx(C_PLUS / 100, abs=1e-5)

    def test_time_limit(self):
        with pytest.raises(LabConfigurationError):
            oracle_integral(OscIntegralSpec(SQUARE, UNIT_BUMP, 2e5))

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"t": 0.0},
            {"t": 1.0, "weight": "inv_sqrt_sigma", "lower_limit": 0.5},
            {"t": 1.0, "weight": "inv_sqrt_sigma_minus_eps", "lower_limit": 0.2, "eps": 0.3},
            {"t": 1.0, "weight": "log"},
        ],
    )
    def test_spec_validation(self, kwargs):
        with pytest.raises(LabConfigurationError):
            OscIntegralSpec(SQUARE, UNIT_BUMP, **kwargs)


class TestLeadingTerm:
    def test_b3_i_at_zero_endpoint(self):
        spec = OscIntegralSpec(SQUARE, UNIT_BUMP, 100.0)
        term = leading_term(spec, "B3_i")
        assert term.value == pytest.approx(C_PLUS / 10, abs=1e-14)
        assert term.error_order == -1.0

    def test_b2_ii_endpoint_formula(self):
        spec = OscIntegralSpec(DispersionRelation((1.0, 1.0)), UNIT_BUMP, 1e4, "inv_sqrt_sigma")
        expected = cmath.exp(1j * 1e4) * C0 / 100
        assert leading_term(spec, "B2_ii").value == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("eps, branch, order", [(0.09, "inner", -0.75), (0.11, "outer", -0.5)])
    def test_b3_iii_regime_split(self, eps, branch, order):
        spec = OscIntegralSpec(SQUARE, UNIT_BUMP, 100.0, "inv_sqrt_sigma_minus_eps", eps, eps)
        term = leading_term(spec, "B3_iii")
        assert term.branch == branch
        assert term.error_order == order

    @pytest.mark.parametrize("sigma0, branch", [(0.09, "inner"), (0.11, "outer")])
    def test_b2_iv_branch_switches_at_unit_scaled_point(self, sigma0, branch):
        phase = DispersionRelation((sigma0**2, -2 * sigma0, 1.0))
        spec = OscIntegralSpec(phase, BumpAmplitude(sigma0, 1.0), 100.0, "inv_sqrt_sigma")
        assert leading_term(spec, "B2_iv").branch == branch

    def test_b2_i_rejects_inflection(self):
        spec = OscIntegralSpec(DispersionRelation((0.0, 0.0, 0.0, 1.0)), BumpAmplitude(0.5, 1.0), 10.0)
        with pytest.raises(HypothesisError, match="zeta''"):
            leading_term(spec, "B2_i")

    def test_weight_mismatch(self):
        spec = OscIntegralSpec(SQUARE, UNIT_BUMP, 10.0)
        with pytest.raises(HypothesisError):
            leading_term(spec, "B3_ii")

    def test_unknown_case(self):
        with pytest.raises(LabConfigurationError):
            leading_term(OscIntegralSpec(SQUARE, UNIT_BUMP, 10.0), "B4")

    @pytest.mark.parametrize("case", LEADING_CASES)
    def test_reference_specs_satisfy_their_case(self, case):
        term = leading_term(reference_spec(case, 100.0), case)
        assert math.isfinite(abs(term.value))

    def test_comparison_remainder(self):
        item = compare_leading_term(reference_spec("B3_ii", 400.0), "B3_ii")
        assert item.remainder == abs(item.oracle - item.leading)
        assert item.remainder < 1e-3


@pytest.mark.slow
@pytest.mark.parametrize("case", ["B3_i", "B2_i"])
def test_leading_term_remainder_decays(case):
    times = np.geomspace(1e2, 1e4, 8)
    comparisons = [compare_leading_term(reference_spec(case, float(t)), case) for t in times]
    remainders = [max(item.remainder, 1e-300) for item in comparisons]
    claimed = max(item.error_order for item in comparisons)
    assert fit_decay(times, remainders).fitted_exponent <= claimed + 0.1
