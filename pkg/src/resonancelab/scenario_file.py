"""
Scenario files.

A scenario file is line oriented: sections `[dispersion]`, `[symbol]`, `[data]`,
`[grid]` and `[experiments]`, each holding `name = value` lines. Values are
numbers (`inf` allowed), `true`/`false`, bare words or bracketed lists; `#`
starts a comment. Parsing is strict: unknown keys, out-of-range values and
repeated sections are all reported with their line numbers, and nothing is
returned unless the whole file validates.

    [dispersion]
    preset = schrodinger_shifted
    kappa = 1.0

    [experiments]
    q = [2, inf]
    t_min = 50
    t_max = 1000
"""

import math
import re
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from agno.utils.log import log_debug
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from pydantic import model_validator

from .config import DEFAULT_SETTINGS, LabSettings
from .dispersion_geometry import DispersionRelation, DispersionTriple, preset_triple
from .duhamel import (
    PRESET_SUPPORTS,
    EvolutionMethod,
    Scenario,
    build_scenario,
    choose_grid,
    preset_scenario,
)
from .errors import ScenarioFileError
from .rate_lab import Regime
from .spectral_core import BilinearSymbol, Box, Grid, NormSpec, WitnessKind, make_witness

SECTION_NAMES: Tuple[str, ...] = ("dispersion", "symbol", "data", "grid", "experiments")
_SECTION_RE = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")
_KEY_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")
_WORD_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")

PresetName = Literal[
    "schrodinger", "schrodinger_shifted", "gap", "definite", "tilted"
]
Scalar = Union[bool, float, str]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DispersionSection(_Section):
    preset: Optional[PresetName] = None
    kappa: float = Field(default=1.0, gt=0)
    a: Optional[List[float]] = None
    b: Optional[List[float]] = None
    c: Optional[List[float]] = None
    name: str = "custom"

    @model_validator(mode="after")
    def _one_source(self) -> "DispersionSection":
        explicit = [self.a, self.b, self.c]
        if self.preset is None and any(v is None for v in explicit):
            raise ValueError("give either preset or all of a, b, c")
        if self.preset is not None and any(v is not None for v in explicit):
            raise ValueError("preset and explicit coefficients are exclusive")
        return self

    @field_validator("a", "b", "c")
    @classmethod
    def _degree(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and not 1 <= len(value) <= 5:
            raise ValueError("coefficient lists hold 1 to 5 entries (degree <= 4)")
        return value


class SymbolSection(_Section):
    kind: Literal["radial_bump", "constant"] = "radial_bump"
    center: Optional[Tuple[float, float]] = None
    radius: Optional[float] = Field(default=None, gt=0)
    height: float = 1.0
    box: Optional[Tuple[float, float, float, float]] = None

    @model_validator(mode="after")
    def _support(self) -> "SymbolSection":
        if self.kind == "constant" and self.box is None:
            raise ValueError("a constant symbol needs box = [xi_min, xi_max, eta_min, eta_max]")
        return self


class DataSection(_Section):
    kind: WitnessKind = "gaussian"
    width: float = Field(default=4.0, gt=0)
    s: float = Field(default=0.0, ge=0, le=4)


class GridSection(_Section):
    n_points: Optional[int] = Field(default=None, ge=64)
    length: Optional[float] = Field(default=None, gt=0)
    resolution: int = Field(default=256, ge=64, le=4096)

    @model_validator(mode="after")
    def _paired(self) -> "GridSection":
        if (self.n_points is None) != (self.length is None):
            raise ValueError("n_points and length go together")
        return self


class ExperimentsSection(_Section):
    label: Optional[str] = None
    times: Optional[List[float]] = None
    t_min: float = Field(default=20.0, gt=0)
    t_max: float = Field(default=500.0, gt=0, le=1e5)
    samples: int = Field(default=16, ge=8, le=512)
    q: List[float] = Field(default_factory=lambda: [2.0, math.inf])
    weights: List[float] = Field(default_factory=list)
    regime: Optional[Regime] = None
    lower_bound: bool = False
    strichartz: Optional[Tuple[float, float, float]] = None
    method: EvolutionMethod = "symbol_form"

    @field_validator("q", "weights", "times", mode="before")
    @classmethod
    def _listify(cls, value: Any) -> Any:
        if value is None or isinstance(value, list):
            return value
        return [value]

    @field_validator("q")
    @classmethod
    def _lebesgue_range(cls, value: List[float]) -> List[float]:
        for q in value:
            if math.isnan(q) or not 2.0 <= q <= math.inf:
                raise ValueError(f"q ∈ [2, inf], got {q:g}")
        return value

    @field_validator("weights")
    @classmethod
    def _weight_range(cls, value: List[float]) -> List[float]:
        for s in value:
            if not 0.0 <= s <= 4.0:
                raise ValueError(f"s ∈ [0, 4], got {s:g}")
        return value

    @field_validator("times")
    @classmethod
    def _positive_times(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and (len(value) < 2 or min(value) <= 0):
            raise ValueError("times needs at least two positive entries")
        return value

    @model_validator(mode="after")
    def _window(self) -> "ExperimentsSection":
        if self.times is None and self.t_min >= self.t_max:
            raise ValueError("t_min must be below t_max")
        return self


class ScenarioFile(BaseModel):
    """A fully validated scenario description."""

    model_config = ConfigDict(frozen=True)

    source: str = "<text>"
    dispersion: DispersionSection
    symbol: SymbolSection = SymbolSection()
    data: DataSection = DataSection()
    grid: GridSection = GridSection()
    experiments: ExperimentsSection = ExperimentsSection()

    @property
    def label(self) -> str:
        if self.experiments.label:
            return self.experiments.label
        if self.dispersion.preset:
            return self.dispersion.preset
        return Path(self.source).stem or "scenario"

    def time_grid(self, t_max: Optional[float] = None) -> np.ndarray:
        """Explicit times, or log-spaced samples on [t_min, t_max]."""
        if self.experiments.times is not None:
            return np.asarray(sorted(self.experiments.times), dtype=float)
        upper = t_max or self.experiments.t_max
        return np.geomspace(self.experiments.t_min, upper, self.experiments.samples)

    def norm_specs(self) -> List[NormSpec]:
        specs = [NormSpec.lebesgue(q) for q in self.experiments.q]
        specs.extend(NormSpec.weighted(s) for s in self.experiments.weights)
        return specs

    def horizon(self, t_max: Optional[float] = None) -> float:
        """Largest time any experiment of this file needs."""
        horizon = float(self.time_grid(t_max).max())
        if self.experiments.strichartz is not None:
            horizon = max(horizon, self.experiments.strichartz[2])
        return horizon

    def build(
        self,
        t_max: Optional[float] = None,
        resolution: Optional[int] = None,
        settings: LabSettings = DEFAULT_SETTINGS,
    ) -> Scenario:
        """Instantiate the scenario; module refusals propagate unchanged."""
        horizon = self.horizon(t_max)
        resolution = resolution or self.grid.resolution
        grid = None
        if self.grid.n_points is not None and self.grid.length is not None:
            grid = Grid(self.grid.n_points, self.grid.length)
        sym, data = self.symbol, self.data

        preset = self.dispersion.preset
        if preset is not None and sym.kind == "radial_bump" and sym.height == 1.0:
            return preset_scenario(
                preset,
                kappa=self.dispersion.kappa,
                t_max=horizon,
                width=data.width,
                center=sym.center,
                radius=sym.radius,
                grid=grid,
                data_kind=data.kind,
                resolution=resolution,
                label=self.label,
                settings=settings,
            )

        triple = self._triple()
        symbol = self._symbol()
        spatial = data.width if data.kind == "gaussian" else 1.0 / data.width
        if grid is None:
            grid = choose_grid(triple, symbol.box, spatial, horizon)
        xi_c, eta_c = symbol.box.center
        f = make_witness(data.kind, 0.0, xi_c, data.width, grid)
        g = make_witness(data.kind, 0.0, eta_c, data.width, grid)
        return build_scenario(
            triple, symbol, f, g, self.label, horizon, resolution, settings
        )

    def _triple(self) -> DispersionTriple:
        section = self.dispersion
        if section.preset is not None:
            return preset_triple(section.preset, section.kappa)
        assert section.a is not None and section.b is not None and section.c is not None
        return DispersionTriple(
            DispersionRelation(tuple(section.a)),
            DispersionRelation(tuple(section.b)),
            DispersionRelation(tuple(section.c)),
            section.name,
        )

    def _symbol(self) -> BilinearSymbol:
        sym = self.symbol
        if sym.kind == "constant":
            assert sym.box is not None
            return BilinearSymbol.constant(sym.height, Box(*sym.box))
        center, radius = sym.center, sym.radius
        if self.dispersion.preset is not None:
            default_center, default_radius = PRESET_SUPPORTS[self.dispersion.preset]
            center = center or default_center
            radius = radius or default_radius
        if center is None or radius is None:
            raise ScenarioFileError(
                [f"{self.source}: custom triples need symbol center and radius"],
                self.source,
            )
        return BilinearSymbol.radial_bump(center, radius, sym.height)


_SECTION_MODELS = {
    "dispersion": DispersionSection,
    "symbol": SymbolSection,
    "data": DataSection,
    "grid": GridSection,
    "experiments": ExperimentsSection,
}


def _parse_scalar(text: str) -> Scalar:
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("inf", "+inf", "infinity"):
        return math.inf
    if lowered in ("-inf", "-infinity"):
        return -math.inf
    try:
        return float(text)
    except ValueError:
        pass
    if _WORD_RE.match(text):
        return text
    raise ValueError(f"cannot read value {text!r}")


def _parse_value(text: str) -> Union[Scalar, List[Scalar]]:
    if not text:
        raise ValueError("missing value")
    if text.startswith("["):
        if not text.endswith("]"):
            raise ValueError("unterminated list")
        inner = text[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(item.strip()) for item in inner.split(",")]
    return _parse_scalar(text)


def _pydantic_diagnostics(
    error: ValidationError,
    source: str,
    section: str,
    header_line: int,
    key_lines: Dict[str, int],
) -> List[str]:
    diagnostics = []
    for item in error.errors():
        loc = item.get("loc", ())
        key = str(loc[0]) if loc else ""
        line = key_lines.get(key, header_line)
        if item.get("type") == "extra_forbidden":
            message = f"unknown key '{key}' in [{section}]"
        else:
            message = str(item.get("msg", "invalid value"))
            message = message.removeprefix("Value error, ")
            if key and not message.startswith(key):
                message = f"{key}: {message}"
        diagnostics.append(f"{source}:{line}: {message}")
    return diagnostics


def parse_scenario(
    path: Optional[Union[str, Path]] = None, text: Optional[str] = None
) -> ScenarioFile:
    """Parse and validate a scenario file (or its text).

    Raises:
        ScenarioFileError: carrying every line-numbered diagnostic
    """
    if (path is None) == (text is None):
        raise ValueError("pass exactly one of path or text")
    source = "<text>"
    if path is not None:
        source = str(path)
        try:
            text = Path(path).read_bytes().decode("utf-8")
        except UnicodeDecodeError as e:
            raise ScenarioFileError([f"{source}: not UTF-8 text ({e})"], source) from e
        except OSError as e:
            raise ScenarioFileError([f"{source}: cannot read ({e})"], source) from e
    assert text is not None

    diagnostics: List[str] = []
    raw: Dict[str, Dict[str, Any]] = {}
    headers: Dict[str, int] = {}
    key_lines: Dict[str, Dict[str, int]] = {}
    current: Optional[str] = None
    skipping = False

    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        header = _SECTION_RE.match(content)
        if header:
            name = header.group(1).lower()
            if name not in SECTION_NAMES:
                diagnostics.append(
                    f"{source}:{number}: unknown section [{name}]; expected one of "
                    + ", ".join(f"[{s}]" for s in SECTION_NAMES)
                )
                current = None
                skipping = True
                continue
            if name in headers:
                diagnostics.append(
                    f"{source}:{number}: duplicate section [{name}] "
                    f"(first defined at line {headers[name]})"
                )
                current = None
                skipping = True
                continue
            headers[name] = number
            raw[name] = {}
            key_lines[name] = {}
            current = name
            skipping = False
            continue
        match = _KEY_RE.match(content)
        if match is None:
            diagnostics.append(f"{source}:{number}: expected 'name = value'")
            continue
        if skipping:
            continue
        if current is None:
            diagnostics.append(f"{source}:{number}: key outside of a section")
            continue
        key, value_text = match.group(1), match.group(2).strip()
        if key in key_lines[current]:
            diagnostics.append(
                f"{source}:{number}: duplicate key '{key}' in [{current}] "
                f"(first defined at line {key_lines[current][key]})"
            )
            continue
        key_lines[current][key] = number
        try:
            raw[current][key] = _parse_value(value_text)
        except ValueError as e:
            diagnostics.append(f"{source}:{number}: {key}: {e}")

    if "dispersion" not in raw:
        diagnostics.append(f"{source}:1: missing required section [dispersion]")

    sections: Dict[str, BaseModel] = {}
    for name, values in raw.items():
        try:
            sections[name] = _SECTION_MODELS[name].model_validate(values)
        except ValidationError as e:
            diagnostics.extend(
                _pydantic_diagnostics(e, source, name, headers[name], key_lines[name])
            )

    if diagnostics:
        raise ScenarioFileError(diagnostics, source)
    log_debug(f"parsed scenario file {source} with sections {sorted(sections)}")
    return ScenarioFile(source=source, **sections)
