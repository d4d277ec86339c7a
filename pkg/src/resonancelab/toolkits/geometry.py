"""
Geometry Tools

Trace and classify the resonance sets of a dispersion triple on a frequency box.
"""

from typing import Dict, List

from ..dispersion_geometry import (
    PRESET_NAMES,
    ResonanceGeometry,
    analyze_geometry,
    phase_gradient,
    preset_triple,
)
from ..errors import LabComputationError
from ..spectral_core import Box
from .base import BaseLabTools

MIN_RESOLUTION = 64
MAX_RESOLUTION = 1024


class GeometryTools(BaseLabTools):
    """Resonance-set tracing and Gamma classification for preset triples."""

    def __init__(
        self,
        add_instructions: bool = True,
        max_resolution: int = 512,
        **kwargs,
    ):
        """Initialize the geometry toolkit.

        Args:
            add_instructions: Whether to attach LLM usage instructions.
            max_resolution: Upper bound on trace resolution (clamped to 64..1024).
        """
        self.max_resolution = self._clamp(max_resolution, MIN_RESOLUTION, MAX_RESOLUTION)
        instructions = self.get_llm_usage_instructions() if add_instructions else ""
        super().__init__(
            name="resonance_geometry",
            add_instructions=add_instructions,
            instructions=instructions,
            **kwargs,
        )

        self.register(self.analyze_triple)
        self.register(self.phase_value)

    @staticmethod
    def _geometry_summary(geom: ResonanceGeometry) -> Dict[str, object]:
        classification = geom.classification
        return {
            "classification": classification.tag if classification else None,
            "details": classification.details if classification else "",
            "gamma_segments": len(geom.gamma),
            "gamma_vertices": int(sum(len(line) for line in geom.gamma)),
            "delta_segments": len(geom.delta),
            "characteristic_points": [
                {"xi": p.xi, "eta": p.eta, "direction": p.direction}
                for p in geom.characteristic_points
            ],
        }

    def analyze_triple(
        self,
        preset: str,
        kappa: float,
        center_xi: float,
        center_eta: float,
        support_radius: float,
        resolution: int,
    ) -> str:
        """
        Trace Gamma and Delta, refine space-time resonant points and classify Gamma.

        Args:
            preset: schrodinger, schrodinger_shifted, gap, definite or tilted
            kappa: Shift of b for schrodinger_shifted (ignored otherwise)
            center_xi: Centre of the symbol support, first input frequency
            center_eta: Centre of the symbol support, second input frequency
            support_radius: Half-width of the square support box
            resolution: Trace cells per side (clamped to the toolkit maximum)

        Returns:
            JSON string with classification, resonant points and trace sizes
        """
        preset = self._validate_choice(preset, PRESET_NAMES, "preset")
        kappa = self._validate_positive(kappa, "kappa")
        radius = self._validate_positive(support_radius, "support_radius")
        resolution = self._clamp(resolution, MIN_RESOLUTION, self.max_resolution)
        triple = preset_triple(preset, kappa)
        support = Box.around((float(center_xi), float(center_eta)), radius)
        try:
            trace_box = support.expanded(0.05 * support.diagonal)
            geom = analyze_geometry(
                triple, trace_box, support, resolution, self.settings
            )
        except (ValueError, ArithmeticError) as e:
            self._log_unexpected_error("Failed to analyze triple", e)
            raise LabComputationError(f"Failed to analyze triple: {e}") from e

        points: List[Dict[str, object]] = [
            {
                "xi": p.xi0,
                "eta": p.eta0,
                "phi_xi": p.phi_xi,
                "phi_etaeta": p.phi_etaeta,
                "transversal": p.transversal,
                "refined": p.refined,
            }
            for p in geom.points
        ]
        summary = self._geometry_summary(geom)
        return self._format_json_response(
            {
                "operation": "analyze_triple",
                "result": summary["classification"],
                "inputs": {
                    "preset": preset,
                    "kappa": kappa,
                    "center": [center_xi, center_eta],
                    "support_radius": radius,
                    "resolution": resolution,
                },
                "summary": {**summary, "resonant_points": points},
                "metadata": self._base_metadata(
                    "marching_squares_with_root_polishing",
                    hypothesis_h=triple.hypothesis_h(support),
                ),
            }
        )

    def phase_value(self, preset: str, kappa: float, xi: float, eta: float) -> str:
        """
        Evaluate phi, its gradient and the space resonance field at a frequency pair.

        Args:
            preset: schrodinger, schrodinger_shifted, gap, definite or tilted
            kappa: Shift of b for schrodinger_shifted (ignored otherwise)
            xi: First input frequency
            eta: Second input frequency

        Returns:
            JSON string with phi, grad phi and Phi in output coordinates
        """
        preset = self._validate_choice(preset, PRESET_NAMES, "preset")
        kappa = self._validate_positive(kappa, "kappa")
        triple = preset_triple(preset, kappa)
        xi, eta = float(xi), float(eta)
        phi = float(triple.phi(xi, eta))
        grad = phase_gradient(triple, xi, eta)
        return self._format_json_response(
            {
                "operation": "phase_value",
                "result": phi,
                "inputs": {"preset": preset, "kappa": kappa, "xi": xi, "eta": eta},
                "summary": {
                    "phi": phi,
                    "phi_xi": float(grad[0]),
                    "phi_eta": float(grad[1]),
                    "space_resonance": float(grad[0] - grad[1]),
                    "Phi_output": float(triple.big_phi(xi + eta, eta)),
                    "time_resonant": abs(phi) <= self.settings.trace_tolerance,
                },
                "metadata": self._base_metadata("exact_polynomial_derivatives"),
            }
        )

    @staticmethod
    def get_llm_usage_instructions() -> str:
        """Return short, text-first usage instructions for geometry tools."""
        return """
<resonance_geometry>
Space and time resonance sets of a quadratic dispersive system

GOAL
- Classify the time resonance set Gamma = {phi = 0} inside a symbol support and locate
  space-time resonant points (Gamma meets Delta).

Tools:
- analyze_triple(preset, kappa, center_xi, center_eta, support_radius, resolution)
- phase_value(preset, kappa, xi, eta)

Notes:
- phi(xi, eta) = -a(xi + eta) + b(xi) + c(eta); Phi is phi in output coordinates.
- Resonant points are reported in output coordinates (xi, eta) with Phi_xi and Phi_etaeta.
- The classification tag selects the decay-rate row used by the rate tools.
</resonance_geometry>
"""
