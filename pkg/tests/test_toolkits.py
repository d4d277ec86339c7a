import json
import math

import pytest

from resonancelab.errors import LabConfigurationError
from resonancelab.oscillatory import C_PLUS
from resonancelab.toolkits import GeometryTools, OscillatoryTools, RateTools


@pytest.fixture(scope="module")
def geometry_tools():
    return GeometryTools()


@pytest.fixture(scope="module")
def oscillatory_tools():
    return OscillatoryTools()


@pytest.fixture(scope="module")
def rate_tools():
    return RateTools()


def test_tools_are_registered(geometry_tools, oscillatory_tools, rate_tools):
    assert set(geometry_tools.functions) == {"analyze_triple", "phase_value"}
    assert set(oscillatory_tools.functions) == {
        "special_function",
        "compare_leading_term",
        "fresnel_constants",
    }
    assert "scaling_experiment" in rate_tools.functions
    assert "<resonance_rates>" in RateTools.get_llm_usage_instructions()


class TestGeometryTools:
    def test_phase_value(self, geometry_tools):
        payload = json.loads(geometry_tools.phase_value("schrodinger", 1.0, 1.0, 2.0))
        assert payload["operation"] == "phase_value"
        assert payload["result"] == pytest.approx(-4.0)
        assert payload["summary"]["space_resonance"] == pytest.approx(-2.0)
        assert payload["summary"]["time_resonant"] is False

    def test_analyze_triple(self, geometry_tools):
        payload = json.loads(
            geometry_tools.analyze_triple(
                "schrodinger_shifted", 1.0, math.sqrt(0.5), math.sqrt(0.5), 0.25, 128
            )
        )
        assert payload["result"] == "transversal_point_intersection"
        (point,) = payload["summary"]["resonant_points"]
        assert point["xi"] == pytest.approx(math.sqrt(2.0), abs=1e-4)
        assert point["transversal"] is True
        assert payload["inputs"]["resolution"] == 128

    def test_unknown_preset(self, geometry_tools):
        with pytest.raises(LabConfigurationError, match="preset"):
            geometry_tools.phase_value("kdv", 1.0, 0.0, 0.0)

    def test_negative_radius(self, geometry_tools):
        with pytest.raises(LabConfigurationError):
            geometry_tools.analyze_triple("gap", 1.0, 0.5, 0.5, -0.5, 64)


class TestOscillatoryTools:
    def test_g1_at_zero(self, oscillatory_tools):
        payload = json.loads(oscillatory_tools.special_function("G1", 0.0))
        assert payload["result"]["re"] == pytest.approx(C_PLUS.real)
        assert payload["result"]["im"] == pytest.approx(C_PLUS.imag)

    def test_fresnel_constants(self, oscillatory_tools):
        payload = json.loads(oscillatory_tools.fresnel_constants())
        assert payload["summary"]["max_deviation"] < 1e-6

    def test_leading_term(self, oscillatory_tools):
        payload = json.loads(oscillatory_tools.compare_leading_term("B3_ii", 400.0))
        assert payload["result"] < 1e-3
        assert payload["summary"]["claimed_error_order"] == -1.0

    @pytest.mark.parametrize(
        "name, x", [("G3", 1.0), ("G1", True), ("G2", float("nan")), ("G1", 2e4)]
    )
    def test_rejections(self, oscillatory_tools, name, x):
        with pytest.raises(LabConfigurationError):
            oscillatory_tools.special_function(name, x)

    def test_time_limit(self, oscillatory_tools):
        with pytest.raises(LabConfigurationError):
            oscillatory_tools.compare_leading_term("B3_i", 1e6)


class TestRateTools:
    def test_zero_encodes_infinity(self, rate_tools):
        payload = json.loads(
            rate_tools.expected_rate("transversal_point_intersection", 0, 0.0, "thm31")
        )
        assert payload["inputs"]["q"] == "inf"
        assert payload["result"]["log_power"] == 1
        assert payload["summary"]["bounded"] is False

    def test_bounded_row(self, rate_tools):
        payload = json.loads(rate_tools.expected_rate("empty", 2.0, 0.0, "thm31"))
        assert payload["result"]["exponent"] == 0.0
        assert payload["summary"]["bounded"] is True

    def test_fit_series(self, rate_tools):
        times = [10.0 ** (k / 4) for k in range(9)]
        values = [t**-0.5 for t in times]
        payload = json.loads(rate_tools.fit_series(times, values, "power"))
        assert payload["result"] == pytest.approx(-0.5)
        assert payload["inputs"]["samples"] == 9

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"tag": "circle", "q": 2.0, "s": 0.0, "regime": "thm31"},
            {"tag": "empty", "q": 1.5, "s": 0.0, "regime": "thm31"},
            {"tag": "empty", "q": 2.0, "s": 5.0, "regime": "thm43"},
            {"tag": "empty", "q": 2.0, "s": 0.0, "regime": "thm7"},
        ],
    )
    def test_rejections(self, rate_tools, kwargs):
        with pytest.raises(LabConfigurationError):
            rate_tools.expected_rate(**kwargs)

    def test_series_validation(self, rate_tools):
        with pytest.raises(LabConfigurationError):
            rate_tools.fit_series([1.0], [1.0], "power")
        with pytest.raises(LabConfigurationError):
            rate_tools.fit_series([1.0, "2"], [1.0, 2.0], "power")

    def test_empty_exponent_list(self, rate_tools):
        with pytest.raises(LabConfigurationError):
            rate_tools.run_preset_rates("gap", 1.0, [], 20.0, 200.0, 8)

    @pytest.mark.slow
    def test_preset_rates_on_gap(self, rate_tools):
        payload = json.loads(rate_tools.run_preset_rates("gap", 1.0, [2.0, 0], 20.0, 200.0, 8))
        assert payload["summary"]["classification"] == "empty"
        assert payload["result"] is True
