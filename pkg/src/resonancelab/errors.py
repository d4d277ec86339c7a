"""
Exception hierarchy shared by every laboratory module.

Library functions raise these typed errors; toolkits let them propagate and wrap
anything unexpected in LabComputationError. The CLI turns them into report
rows with a remedy.
"""

from typing import List, Optional, Sequence


class ResonanceLabError(Exception):
    """Base exception for all laboratory errors."""


class LabConfigurationError(ResonanceLabError):
    """Invalid configuration: bad grid, parameter outside its strip, bad preset."""


class LabComputationError(ResonanceLabError):
    """Unexpected numerical failure surfaced by a toolkit."""


class AliasingError(ResonanceLabError):
    """A bilinear product would place energy beyond the grid's Nyquist box."""


class ResolutionError(ResonanceLabError):
    """A requested feature is narrower than the grid can resolve."""


class DegenerateGeometryError(ResonanceLabError):
    """A traced field vanishes identically on the requested box."""


class HypothesisError(ResonanceLabError):
    """The hypotheses of an asymptotic statement fail for the given inputs."""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        message = f"hypothesis failed: {condition}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class AccuracyError(ResonanceLabError):
    """The quadrature oracle could not reach its error target."""

    def __init__(self, estimate: float, target: float):
        self.estimate = estimate
        self.target = target
        super().__init__(
            f"error estimate {estimate:.3e} above target {target:.1e}"
        )


class WrapAroundError(ResonanceLabError):
    """The requested time would let dispersed waves wrap around the torus."""

    def __init__(self, t: float, required_length: float, length: float):
        self.t = t
        self.required_length = required_length
        self.length = length
        super().__init__(
            f"t={t:g} exceeds the wrap-around budget of a grid of length "
            f"{length:g}; a length of at least {required_length:.6g} is required"
        )


class ScenarioFileError(ResonanceLabError):
    """Scenario file diagnostics, one entry per offending line."""

    def __init__(self, diagnostics: Sequence[str], source: Optional[str] = None):
        self.diagnostics: List[str] = list(diagnostics)
        self.source = source
        prefix = f"{source}: " if source else ""
        super().__init__(prefix + "; ".join(self.diagnostics))
