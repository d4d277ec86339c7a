"""
Public re-exports for the resonance laboratory.
"""

from .base import StrictToolkit
from .config import LabSettings
from .dispersion_geometry import (
    DispersionRelation,
    DispersionTriple,
    analyze_geometry,
    preset_triple,
)
from .duhamel import Scenario, build_scenario, evolve, preset_scenario
from .errors import ResonanceLabError
from .rate_lab import expected_rate, fit_decay
from .scenario_file import parse_scenario
from .toolkits import GeometryTools, OscillatoryTools, RateTools

__all__ = [
    "StrictToolkit",
    "LabSettings",
    "DispersionRelation",
    "DispersionTriple",
    "analyze_geometry",
    "preset_triple",
    "Scenario",
    "build_scenario",
    "evolve",
    "preset_scenario",
    "ResonanceLabError",
    "expected_rate",
    "fit_decay",
    "parse_scenario",
    "GeometryTools",
    "OscillatoryTools",
    "RateTools",
]
