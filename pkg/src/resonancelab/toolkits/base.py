"""Laboratory toolkit base utilities.

Shared validation and JSON helpers for every laboratory toolkit. All tools
return JSON strings.
"""

import json
import math
from datetime import datetime
from typing import Any, Dict, List, Optional

from agno.utils.log import log_error

from ..base import StrictToolkit
from ..config import LabSettings
from ..errors import LabConfigurationError

MAX_SERIES_LENGTH = 4096


def complex_pair(value: complex) -> Dict[str, float]:
    """JSON-friendly rendering of a complex number."""
    value = complex(value)
    return {"re": value.real, "im": value.imag, "abs": abs(value)}


class BaseLabTools(StrictToolkit):
    """Base toolkit providing shared validation, formatting and metadata."""

    def __init__(
        self,
        name: str = "base_lab",
        add_instructions: bool = True,
        instructions: str = "",
        settings: Optional[LabSettings] = None,
        **kwargs,
    ):
        """Initialize a laboratory toolkit.

        Args:
            name: Toolkit name.
            add_instructions: Whether to attach LLM usage instructions.
            instructions: Instructions text.
            settings: Numerical defaults; read from the environment when omitted.
        """
        self.settings = settings or LabSettings.from_env()
        super().__init__(
            name=name,
            instructions=instructions if add_instructions else "",
            add_instructions=add_instructions,
            **kwargs,
        )

    @staticmethod
    def _clamp(value: int, low: int, high: int) -> int:
        return max(low, min(high, int(value)))

    def _validate_positive(self, value: float, field_name: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise LabConfigurationError(f"{field_name} must be a number")
        if not math.isfinite(value) or value <= 0:
            raise LabConfigurationError(f"{field_name} must be positive and finite")
        return float(value)

    def _validate_exponent(self, q: float) -> float:
        """Lebesgue exponent; the string-free tool surface encodes inf as 0."""
        if isinstance(q, bool) or not isinstance(q, (int, float)):
            raise LabConfigurationError("q must be a number")
        if q == 0:
            return math.inf
        if math.isnan(q) or not 2.0 <= q <= math.inf:
            raise LabConfigurationError(f"q ∈ [2, inf], got {q}")
        return float(q)

    def _validate_weight(self, s: float) -> float:
        if isinstance(s, bool) or not isinstance(s, (int, float)):
            raise LabConfigurationError("s must be a number")
        if not 0.0 <= s <= 4.0:
            raise LabConfigurationError(f"s ∈ [0, 4], got {s}")
        return float(s)

    def _validate_choice(self, value: str, choices: tuple, field_name: str) -> str:
        if value not in choices:
            raise LabConfigurationError(
                f"{field_name} must be one of {', '.join(choices)}, got {value!r}"
            )
        return value

    def _validate_series(self, values: List[float], field_name: str) -> List[float]:
        if not isinstance(values, list) or len(values) < 2:
            raise LabConfigurationError(f"{field_name} must be a list of at least 2 numbers")
        if len(values) > MAX_SERIES_LENGTH:
            raise LabConfigurationError(
                f"{field_name} cannot exceed {MAX_SERIES_LENGTH} entries"
            )
        validated = []
        for i, value in enumerate(values):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise LabConfigurationError(f"{field_name}[{i}] must be a number")
            validated.append(float(value))
        return validated

    def _format_json_response(self, data: Any) -> str:
        """Format response as a JSON string."""
        try:
            return json.dumps(data, indent=2, ensure_ascii=False, default=str)
        except Exception as e:  # pylint: disable=broad-exception-caught
            log_error(f"Error formatting JSON response: {e}")
            return json.dumps({"error": "Failed to format response"}, indent=2)

    def _base_metadata(self, method: str, **extra: Any) -> Dict[str, Any]:
        """Return a consistent metadata object for tool responses."""
        return {
            "method": method,
            "timestamp": datetime.now().isoformat(),
            **extra,
        }

    def _log_unexpected_error(self, message: str, exc: Exception) -> None:
        """Log unexpected exceptions with a consistent message."""
        log_error(f"{message}: {exc}")

