"""
Laboratory settings.

Defaults for tolerances and window sizes live in one validated model so that the
CLI, toolkits and tests agree on them.
"""

import os
from pathlib import Path

from pydantic import BaseModel, Field

OUTPUT_ENV_VAR = "RESONANCE_LAB_OUT"
DEFAULT_OUTPUT_DIR = "resonance-out"


class LabSettings(BaseModel):
    """Tunable numerical defaults."""

    trace_tolerance: float = Field(default=1e-10, gt=0, le=1e-6)
    transversality_floor: float = Field(default=1e-6, gt=0, lt=1)
    curvature_floor: float = Field(default=1e-3, gt=0)
    regime_window: float = Field(default=0.1, gt=0, lt=0.5)
    rate_tolerance: float = Field(default=0.1, ge=0, le=1)
    scaling_tolerance: float = Field(default=0.15, ge=0, le=1)
    oracle_target: float = Field(default=1e-9, gt=0, le=1e-3)
    fit_window_start: float = Field(default=20.0, gt=0)
    trace_resolution: int = Field(default=256, ge=64, le=4096)
    output_dir: Path = Field(default=Path(DEFAULT_OUTPUT_DIR))

    @classmethod
    def from_env(cls) -> "LabSettings":
        """Build settings, taking the output directory from the environment."""
        output = os.environ.get(OUTPUT_ENV_VAR)
        if output:
            return cls(output_dir=Path(output))
        return cls()


DEFAULT_SETTINGS = LabSettings()
