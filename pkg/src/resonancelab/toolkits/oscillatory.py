"""
Oscillatory Tools

Transition functions G1, G2 and oracle checks of boundary stationary-phase terms.
"""

import math

from ..errors import LabComputationError, LabConfigurationError
from ..oscillatory import (
    C0,
    C_MINUS,
    C_PLUS,
    LEADING_CASES,
    MAX_ARGUMENT,
    MAX_TIME,
    compare_leading_term,
    fresnel_g1,
    fresnel_g2,
    g1_asymptotic,
    g2_asymptotic,
    quadrature_constants,
    reference_spec,
)
from .base import BaseLabTools, complex_pair

SPECIAL_FUNCTIONS = ("G1", "G2", "G1_asymptotic", "G2_asymptotic")


class OscillatoryTools(BaseLabTools):
    """Special functions and leading-term comparisons."""

    def __init__(self, add_instructions: bool = True, **kwargs):
        """Initialize the oscillatory toolkit and register all methods."""
        instructions = self.get_llm_usage_instructions() if add_instructions else ""
        super().__init__(
            name="oscillatory_integrals",
            add_instructions=add_instructions,
            instructions=instructions,
            **kwargs,
        )

        self.register(self.special_function)
        self.register(self.compare_leading_term)
        self.register(self.fresnel_constants)

    def special_function(self, name: str, x: float) -> str:
        """
        Evaluate G1, G2 or one of their large-|x| expansions.

        Args:
            name: G1, G2, G1_asymptotic or G2_asymptotic
            x: Real argument, |x| <= 1e4 (expansions need x != 0)

        Returns:
            JSON string with the complex value
        """
        name = self._validate_choice(name, SPECIAL_FUNCTIONS, "name")
        if isinstance(x, bool) or not isinstance(x, (int, float)) or math.isnan(x):
            raise LabConfigurationError("x must be a number")
        if abs(x) > MAX_ARGUMENT:
            raise LabConfigurationError(f"|x| must not exceed {MAX_ARGUMENT:g}")
        functions = {
            "G1": fresnel_g1,
            "G2": fresnel_g2,
            "G1_asymptotic": lambda y: g1_asymptotic(y, terms=2),
            "G2_asymptotic": g2_asymptotic,
        }
        value = complex(functions[name](float(x)))
        return self._format_json_response(
            {
                "operation": "special_function",
                "result": complex_pair(value),
                "inputs": {"name": name, "x": x},
                "summary": {"modulus": abs(value), "phase": math.atan2(value.imag, value.real)},
                "metadata": self._base_metadata(
                    "fresnel_integrals" if name == "G1" else "rotated_contour_quadrature"
                ),
            }
        )

    def compare_leading_term(self, case: str, t: float) -> str:
        """
        Compare the quadrature oracle with the leading asymptotic term on a reference integral.

        Args:
            case: B2_i, B2_ii, B2_iii, B2_iv, B3_i, B3_ii or B3_iii
            t: Large parameter, 0 < t <= 1e5

        Returns:
            JSON string with oracle value, leading term and remainder
        """
        case = self._validate_choice(case, LEADING_CASES, "case")
        t = self._validate_positive(t, "t")
        if t > MAX_TIME:
            raise LabConfigurationError(f"t must not exceed {MAX_TIME:g}")
        try:
            item = compare_leading_term(reference_spec(case, t), case, self.settings)  # type: ignore[arg-type]
        except (ValueError, ArithmeticError) as e:
            self._log_unexpected_error("Failed to compare leading term", e)
            raise LabComputationError(f"Failed to compare leading term: {e}") from e
        return self._format_json_response(
            {
                "operation": "compare_leading_term",
                "result": item.remainder,
                "inputs": {"case": case, "t": t},
                "summary": {
                    "oracle": complex_pair(item.oracle),
                    "leading": complex_pair(item.leading),
                    "claimed_error_order": item.error_order,
                    "branch": item.branch,
                    "remainder_times_t_power": item.remainder * t ** (-item.error_order),
                },
                "metadata": self._base_metadata("adaptive_gauss_legendre_panels"),
            }
        )

    def fresnel_constants(self) -> str:
        """
        Fresnel constants C0, C+ and C- by independent quadrature next to their closed forms.

        Returns:
            JSON string with both evaluations and their largest difference
        """
        measured = quadrature_constants()
        pairs = {
            "C0": (measured.C0, C0),
            "C_plus": (measured.C_plus, C_PLUS),
            "C_minus": (measured.C_minus, C_MINUS),
        }
        deviation = max(abs(a - b) for a, b in pairs.values())
        return self._format_json_response(
            {
                "operation": "fresnel_constants",
                "result": {k: complex_pair(v[0]) for k, v in pairs.items()},
                "inputs": {},
                "summary": {
                    "closed_form": {k: complex_pair(v[1]) for k, v in pairs.items()},
                    "max_deviation": deviation,
                },
                "metadata": self._base_metadata("steepest_descent_quadrature"),
            }
        )

    @staticmethod
    def get_llm_usage_instructions() -> str:
        """Return short, text-first usage instructions for oscillatory tools."""
        return """
<oscillatory_integrals>
Boundary stationary phase and Fresnel-type transition functions

GOAL
- Evaluate G1(x) = int_x^inf e^{i s^2} ds and G2(x) = int_x^inf e^{i s^2}/sqrt(s - x) ds,
  and check leading asymptotic terms against a brute-force quadrature oracle.

Tools:
- special_function(name, x)
- compare_leading_term(case, t)
- fresnel_constants()

Notes:
- Complex values are returned as {"re", "im", "abs"}.
- compare_leading_term uses a fixed reference integral per case; the remainder should
  shrink like t^(claimed_error_order).
</oscillatory_integrals>
"""
