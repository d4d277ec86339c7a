"""
Rate Tools

Decay-rate tables, trajectory fits and preset rate experiments.
"""

import math
from typing import List

import numpy as np

from ..dispersion_geometry import PRESET_NAMES
from ..duhamel import evolve_series, preset_scenario
from ..errors import LabComputationError, LabConfigurationError
from ..rate_lab import (
    FIT_MODELS,
    REGIMES,
    SCALING_FAMILIES,
    DecayLaw,
    expected_rate,
    fit_decay,
    multiplier_scaling_experiment,
    rate_verdicts,
)
from ..spectral_core import NormSpec
from .base import BaseLabTools

MIN_GRID_POINTS = 1 << 8
MAX_GRID_POINTS = 1 << 18
GAMMA_TAGS = (
    "empty",
    "point_order2_definite",
    "curve_noncharacteristic",
    "curve_nonvanishing_curvature",
    "curve_general",
    "transversal_point_intersection",
    "mixed",
)


def _law(law: DecayLaw) -> dict:
    return {
        "exponent": law.exponent,
        "log_power": law.log_power,
        "delta_slack": law.delta_slack,
        "note": law.note,
    }


class RateTools(BaseLabTools):
    """Expected and measured decay rates of the inhomogeneous evolution."""

    def __init__(
        self,
        add_instructions: bool = True,
        max_grid_points: int = 1 << 15,
        **kwargs,
    ):
        """Initialize the rate toolkit.

        Args:
            add_instructions: Whether to attach LLM usage instructions.
            max_grid_points: Largest grid a preset run may use (clamped to 2^8..2^18).
        """
        self.max_grid_points = self._clamp(max_grid_points, MIN_GRID_POINTS, MAX_GRID_POINTS)
        instructions = self.get_llm_usage_instructions() if add_instructions else ""
        super().__init__(
            name="resonance_rates",
            add_instructions=add_instructions,
            instructions=instructions,
            **kwargs,
        )

        self.register(self.expected_rate)
        self.register(self.fit_series)
        self.register(self.run_preset_rates)
        self.register(self.scaling_experiment)

    def expected_rate(self, tag: str, q: float, s: float, regime: str) -> str:
        """
        Look up the predicted growth law t^exponent (log t)^log_power.

        Args:
            tag: Gamma classification tag (e.g. empty, transversal_point_intersection)
            q: Lebesgue exponent in [2, inf]; pass 0 for inf
            s: Weight of the data space L^{2,s}
            regime: thm31, thm32, prop41, thm42, thm43, thm44 or lower_252

        Returns:
            JSON string with the decay law
        """
        tag = self._validate_choice(tag, GAMMA_TAGS, "tag")
        regime = self._validate_choice(regime, REGIMES, "regime")
        q = self._validate_exponent(q)
        s = self._validate_weight(s)
        law = expected_rate(tag, q, s, regime)  # type: ignore[arg-type]
        return self._format_json_response(
            {
                "operation": "expected_rate",
                "result": _law(law),
                "inputs": {"tag": tag, "q": "inf" if math.isinf(q) else q, "s": s, "regime": regime},
                "summary": {
                    "bounded": law.exponent == 0 and law.log_power == 0,
                    "decaying": law.exponent < 0,
                },
                "metadata": self._base_metadata("rate_table"),
            }
        )

    def fit_series(self, times: List[float], values: List[float], model: str) -> str:
        """
        Fit a norm trajectory with a power, power-log or pure-log model.

        Args:
            times: Sample times (at least 8, spanning a decade)
            values: Positive norm values at those times
            model: power, power_log or pure_log

        Returns:
            JSON string with the fitted exponent, log power and r squared
        """
        times = self._validate_series(times, "times")
        values = self._validate_series(values, "values")
        model = self._validate_choice(model, FIT_MODELS, "model")
        fit = fit_decay(times, values, model)  # type: ignore[arg-type]
        return self._format_json_response(
            {
                "operation": "fit_series",
                "result": fit.fitted_exponent,
                "inputs": {"samples": len(times), "model": model},
                "summary": {
                    "fitted_log_power": fit.fitted_log_power,
                    "r_squared": fit.r_squared,
                    "window": list(fit.window),
                    "residual_max": fit.residual_max,
                    "coefficient": fit.coefficient,
                },
                "metadata": self._base_metadata("least_squares"),
            }
        )

    def run_preset_rates(
        self,
        preset: str,
        kappa: float,
        q_values: List[float],
        t_min: float,
        t_max: float,
        samples: int,
    ) -> str:
        """
        Evolve a preset scenario and compare measured decay with the rate table.

        Args:
            preset: schrodinger, schrodinger_shifted, gap, definite or tilted
            kappa: Shift of b for schrodinger_shifted (ignored otherwise)
            q_values: Lebesgue exponents; 0 stands for inf
            t_min: First sample time
            t_max: Last sample time (at least 10 * t_min)
            samples: Number of log-spaced sample times (8..128)

        Returns:
            JSON string with one verdict per exponent
        """
        preset = self._validate_choice(preset, PRESET_NAMES, "preset")
        kappa = self._validate_positive(kappa, "kappa")
        t_min = self._validate_positive(t_min, "t_min")
        t_max = self._validate_positive(t_max, "t_max")
        samples = self._clamp(samples, 8, 128)
        norms = [NormSpec.lebesgue(self._validate_exponent(q)) for q in q_values]
        if not norms:
            raise LabConfigurationError("q_values must not be empty")

        sc = preset_scenario(preset, kappa=kappa, t_max=t_max, settings=self.settings)
        if sc.grid.n_points > self.max_grid_points:
            raise LabConfigurationError(
                f"preset needs {sc.grid.n_points} grid points, above the toolkit "
                f"limit of {self.max_grid_points}"
            )
        times = np.geomspace(t_min, t_max, samples)
        try:
            result = evolve_series(sc, times, norms)
            verdicts = rate_verdicts(sc, result, settings=self.settings)
        except (ValueError, ArithmeticError, MemoryError) as e:
            self._log_unexpected_error("Failed to run preset rates", e)
            raise LabComputationError(f"Failed to run preset rates: {e}") from e

        rows = [
            {
                "norm": v.norm.label,
                "predicted": _law(v.predicted),
                "measured_exponent": v.measured.fitted_exponent,
                "r_squared": v.measured.r_squared,
                "upper_bound_respected": v.upper_bound_respected,
                "sharpness_gap": v.sharpness_gap,
                "note": v.note,
            }
            for v in verdicts
        ]
        return self._format_json_response(
            {
                "operation": "run_preset_rates",
                "result": all(v.passed for v in verdicts),
                "inputs": {
                    "preset": preset,
                    "kappa": kappa,
                    "t_min": t_min,
                    "t_max": t_max,
                    "samples": samples,
                },
                "summary": {
                    "classification": sc.classification_tag,
                    "grid_points": sc.grid.n_points,
                    "verdicts": rows,
                },
                "metadata": self._base_metadata(
                    "duhamel_symbol_evolution", tolerance=self.settings.rate_tolerance
                ),
            }
        )

    def scaling_experiment(self, family: str, q: float, s: float) -> str:
        """
        Measure how a multiplier norm scales with the support size epsilon.

        Args:
            family: ball, curve_nonchar, curve_curvature, curve_nonchar_weighted or interval_truncation
            q: Output Lebesgue exponent in [2, inf]; pass 0 for inf
            s: Weight of the input spaces

        Returns:
            JSON string with fitted slope, bound exponent and compliance
        """
        family = self._validate_choice(family, SCALING_FAMILIES, "family")
        q = self._validate_exponent(q)
        s = self._validate_weight(s)
        verdict = multiplier_scaling_experiment(
            family, q=q, s=s, settings=self.settings  # type: ignore[arg-type]
        )
        return self._format_json_response(
            {
                "operation": "scaling_experiment",
                "result": verdict.fit.fitted_exponent,
                "inputs": {"family": family, "q": "inf" if math.isinf(q) else q, "s": s},
                "summary": {
                    "bound_exponent": verdict.bound_exponent,
                    "compliant": verdict.compliant,
                    "saturated": verdict.saturated,
                    "sharpness_gap": verdict.sharpness_gap,
                    "r_squared": verdict.fit.r_squared,
                },
                "metadata": self._base_metadata("epsilon_log_log_regression"),
            }
        )

    @staticmethod
    def get_llm_usage_instructions() -> str:
        """Return short, text-first usage instructions for rate tools."""
        return """
<resonance_rates>
Decay rates of u(t) = T_t(f, g)

GOAL
- Predict and measure how ||u(t)||_{L^q} grows or decays, given the resonance category.

Tools:
- expected_rate(tag, q, s, regime)
- fit_series(times, values, model)
- run_preset_rates(preset, kappa, q_values, t_min, t_max, samples)
- scaling_experiment(family, q, s)

Notes:
- JSON has no infinity: pass q = 0 for the L^inf norm.
- Rates are t^exponent (log t)^log_power; delta_slack means "up to t^delta for every delta > 0".
- Upper bounds are hard checks (tolerance 0.1 on the exponent); sharpness gaps are informational.

CONTEXT-SIZE RULES (IMPORTANT)
- Preset runs evolve on grids up to 2^15 points; keep samples small when exploring.
</resonance_rates>
"""
