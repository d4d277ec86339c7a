"""Agent-facing laboratory toolkits."""

from .base import BaseLabTools
from .geometry import GeometryTools
from .oscillatory import OscillatoryTools
from .rates import RateTools

__all__ = ["BaseLabTools", "GeometryTools", "OscillatoryTools", "RateTools"]
