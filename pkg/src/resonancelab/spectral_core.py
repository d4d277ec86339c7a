"""
Spectral substrate on a uniform periodic grid.

The continuous line is replaced by a torus of length L sampled at N points
x_j = -L/2 + j*dx. The discrete transform is the unitary one,

    f_hat(xi_k) = dx / sqrt(2 pi) * sum_j exp(-i x_j xi_k) f_j,

stored in centred order xi_k = (k - N/2) * dxi with dxi = 2 pi / L, so that
sum |f|^2 dx == sum |f_hat|^2 dxi. Bilinear multipliers carry the factor that
makes the constant symbol 1 reproduce the pointwise product exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Tuple

import numpy as np
from agno.utils.log import log_debug, log_warning
from scipy.special import erf

from .errors import AliasingError, LabConfigurationError, ResolutionError

SQRT_2PI = math.sqrt(2.0 * math.pi)
SUPPORT_THRESHOLD = 1e-12
LOCALIZATION_TOLERANCE = 1e-6
ROW_CHUNK = 256

WitnessKind = Literal["gaussian", "flat_spectrum", "band_bump"]
NormKind = Literal["lebesgue", "weighted_l2"]
SymbolEvaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]
FrequencyFunction = Callable[[np.ndarray], np.ndarray]

WITNESS_KINDS: Tuple[str, ...] = ("gaussian", "flat_spectrum", "band_bump")


def bump(r: np.ndarray) -> np.ndarray:
    """Smooth compactly supported bump: exp(1 - 1/(1 - r^2)) on |r| < 1, bump(0) = 1."""
    r = np.asarray(r, dtype=float)
    inside = np.abs(r) < 1.0
    safe = np.where(inside, 1.0 - r * r, 1.0)
    return np.where(inside, np.exp(1.0 - 1.0 / safe), 0.0)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L/2, L/2)."""

    n_points: int
    length: float

    def __post_init__(self) -> None:
        n = self.n_points
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise LabConfigurationError("n_points must be an integer")
        if n < 2 or (n & (n - 1)) != 0:
            raise LabConfigurationError(
                f"n_points must be a power of two, got {n}"
            )
        if not math.isfinite(self.length) or self.length <= 0:
            raise LabConfigurationError("length must be a positive number")
        object.__setattr__(self, "n_points", int(n))
        object.__setattr__(self, "length", float(self.length))

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @property
    def frequency_step(self) -> float:
        return 2.0 * math.pi / self.length

    @property
    def max_frequency(self) -> float:
        return math.pi / self.spacing

    @property
    def positions(self) -> np.ndarray:
        return -0.5 * self.length + self.spacing * np.arange(self.n_points)

    @property
    def frequencies(self) -> np.ndarray:
        return self.frequency_step * (
            np.arange(self.n_points) - self.n_points // 2
        )

    def frequency_index(self, xi: float) -> float:
        """Fractional index of frequency `xi` in centred order."""
        return xi / self.frequency_step + self.n_points // 2


@dataclass(frozen=True, eq=False)
class SampledState:
    """Complex field sampled on a grid. `width` records a declared spatial width."""

    grid: Grid
    values: np.ndarray
    width: Optional[float] = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise LabConfigurationError(
                f"expected {self.grid.n_points} samples, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise LabConfigurationError("state values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def scaled(self, factor: complex) -> "SampledState":
        return SampledState(self.grid, self.values * factor, self.width)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Discrete frequency representation in centred order."""

    grid: Grid
    coefficients: np.ndarray
    support_radius: Optional[float] = None

    def __post_init__(self) -> None:
        coefficients = np.asarray(self.coefficients, dtype=complex)
        if coefficients.shape != (self.grid.n_points,):
            raise LabConfigurationError(
                f"expected {self.grid.n_points} coefficients, "
                f"got shape {coefficients.shape}"
            )
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)
        if self.support_radius is None:
            object.__setattr__(self, "support_radius", self._measured_radius())

    def band(
        self, threshold: float = SUPPORT_THRESHOLD
    ) -> Optional[Tuple[int, int]]:
        """Inclusive index range outside which coefficients are below threshold*peak."""
        magnitude = np.abs(self.coefficients)
        peak = float(magnitude.max()) if magnitude.size else 0.0
        if peak == 0.0:
            return None
        significant = np.flatnonzero(magnitude > threshold * peak)
        return int(significant[0]), int(significant[-1])

    def _measured_radius(self) -> float:
        band = self.band()
        if band is None:
            return 0.0
        freqs = self.grid.frequencies
        return float(max(abs(freqs[band[0]]), abs(freqs[band[1]])))

    def __add__(self, other: "Spectrum") -> "Spectrum":
        _require_same_grid(self.grid, other.grid)
        return Spectrum(self.grid, self.coefficients + other.coefficients)

    def __sub__(self, other: "Spectrum") -> "Spectrum":
        _require_same_grid(self.grid, other.grid)
        return Spectrum(self.grid, self.coefficients - other.coefficients)

    def scaled(self, factor: complex) -> "Spectrum":
        return Spectrum(self.grid, self.coefficients * factor)

    def l2_norm(self) -> float:
        return float(
            np.sqrt(
                self.grid.frequency_step * np.sum(np.abs(self.coefficients) ** 2)
            )
        )

    def value_at(self, xi: float) -> complex:
        """Linear interpolation of the coefficients at frequency `xi`."""
        freqs = self.grid.frequencies
        real = np.interp(xi, freqs, self.coefficients.real, left=0.0, right=0.0)
        imag = np.interp(xi, freqs, self.coefficients.imag, left=0.0, right=0.0)
        return complex(real, imag)


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle in the (xi, eta) plane."""

    xi_min: float
    xi_max: float
    eta_min: float
    eta_max: float

    def __post_init__(self) -> None:
        if not (self.xi_min < self.xi_max and self.eta_min < self.eta_max):
            raise LabConfigurationError(f"degenerate box {self}")

    @classmethod
    def around(
        cls, center: Tuple[float, float], radius: float
    ) -> "Box":
        xi, eta = center
        return cls(xi - radius, xi + radius, eta - radius, eta + radius)

    @property
    def center(self) -> Tuple[float, float]:
        return (
            0.5 * (self.xi_min + self.xi_max),
            0.5 * (self.eta_min + self.eta_max),
        )

    @property
    def diagonal(self) -> float:
        return math.hypot(self.xi_max - self.xi_min, self.eta_max - self.eta_min)

    def expanded(self, margin: float) -> "Box":
        return Box(
            self.xi_min - margin,
            self.xi_max + margin,
            self.eta_min - margin,
            self.eta_max + margin,
        )

    def contains(self, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi)
        eta = np.asarray(eta)
        return (
            (xi >= self.xi_min)
            & (xi <= self.xi_max)
            & (eta >= self.eta_min)
            & (eta <= self.eta_max)
        )

    def sum_range(self) -> Tuple[float, float]:
        """Range of xi + eta over the box."""
        return self.xi_min + self.eta_min, self.xi_max + self.eta_max

    def sample(self, points: int = 129) -> Tuple[np.ndarray, np.ndarray]:
        xi = np.linspace(self.xi_min, self.xi_max, points)
        eta = np.linspace(self.eta_min, self.eta_max, points)
        return np.meshgrid(xi, eta, indexing="ij")


@dataclass(frozen=True, eq=False)
class BilinearSymbol:
    """Compactly supported symbol m(xi, eta), zero outside its box."""

    box: Box
    evaluator: SymbolEvaluator
    sup_bound: float = 1.0
    smoothness_note: str = ""

    def __call__(self, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        values = np.asarray(self.evaluator(xi, eta), dtype=complex)
        return np.where(self.box.contains(xi, eta), values, 0.0)

    def output_symbol(self, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """mu(xi, eta) = m(xi - eta, eta), the symbol in output-frequency coordinates."""
        return self(np.asarray(xi) - np.asarray(eta), eta)

    def with_factor(
        self, factor: SymbolEvaluator, sup_bound: float, note: str = ""
    ) -> "BilinearSymbol":
        base = self.evaluator

        def evaluator(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
            return base(xi, eta) * factor(xi, eta)

        return BilinearSymbol(
            self.box, evaluator, sup_bound, note or self.smoothness_note
        )

    @classmethod
    def constant(cls, value: complex, box: Box) -> "BilinearSymbol":
        def evaluator(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
            return np.full(np.broadcast(xi, eta).shape, value, dtype=complex)

        return cls(box, evaluator, abs(value), "constant on box")

    @classmethod
    def radial_bump(
        cls,
        center: Tuple[float, float],
        radius: float,
        height: float = 1.0,
    ) -> "BilinearSymbol":
        if radius <= 0:
            raise LabConfigurationError("bump radius must be positive")
        xi0, eta0 = center

        def evaluator(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
            r = np.hypot(xi - xi0, eta - eta0) / radius
            return height * bump(r)

        return cls(
            Box.around(center, radius),
            evaluator,
            abs(height),
            f"radial bump radius {radius:g}",
        )


@dataclass(frozen=True)
class NormSpec:
    """Lebesgue norm L^q (q in [2, inf]) or weighted L^2 with weight <x>^s."""

    kind: NormKind = "lebesgue"
    q: float = 2.0
    s: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("lebesgue", "weighted_l2"):
            raise LabConfigurationError(f"unknown norm kind {self.kind!r}")
        if math.isnan(self.q) or not 2.0 <= self.q <= math.inf:
            raise LabConfigurationError(f"q must lie in [2, inf], got {self.q}")
        if math.isnan(self.s) or self.s < 0:
            raise LabConfigurationError(f"s must be >= 0, got {self.s}")

    @classmethod
    def lebesgue(cls, q: float) -> "NormSpec":
        return cls("lebesgue", float(q), 0.0)

    @classmethod
    def weighted(cls, s: float) -> "NormSpec":
        return cls("weighted_l2", 2.0, float(s))

    @property
    def label(self) -> str:
        if self.kind == "lebesgue":
            return "Linf" if math.isinf(self.q) else f"L{self.q:g}"
        return f"L2,{self.s:g}"


def _require_same_grid(first: Grid, second: Grid) -> None:
    if first != second:
        raise LabConfigurationError("operands live on different grids")


def _phase_signs(n_points: int) -> np.ndarray:
    """(-1)^(k - N/2): the factor exp(i L xi_k / 2) on centred frequencies."""
    offsets = np.arange(n_points) - n_points // 2
    return np.where(offsets % 2 == 0, 1.0, -1.0)


def transform(state: SampledState) -> Spectrum:
    """Unitary discrete Fourier transform in centred frequency order."""
    grid = state.grid
    raw = np.fft.fftshift(np.fft.fft(state.values))
    coefficients = raw * _phase_signs(grid.n_points) * (grid.spacing / SQRT_2PI)
    return Spectrum(grid, coefficients)


def inverse_transform(spec: Spectrum, padding_factor: int = 1) -> SampledState:
    """Inverse transform; padding_factor > 1 zero-pads the spectrum for finer sampling."""
    if (
        isinstance(padding_factor, bool)
        or not isinstance(padding_factor, (int, np.integer))
        or padding_factor < 1
    ):
        raise LabConfigurationError("padding_factor must be a positive integer")
    grid = spec.grid
    target = Grid(grid.n_points * int(padding_factor), grid.length)
    padded = np.zeros(target.n_points, dtype=complex)
    start = target.n_points // 2 - grid.n_points // 2
    padded[start : start + grid.n_points] = spec.coefficients
    padded *= _phase_signs(target.n_points)
    values = np.fft.ifft(np.fft.ifftshift(padded)) * (
        target.n_points * grid.frequency_step / SQRT_2PI
    )
    return SampledState(target, values)


def apply_linear_group(
    spec: Spectrum, dr: FrequencyFunction, t: float
) -> Spectrum:
    """Multiply each coefficient by exp(i t dr(xi))."""
    if t == 0:
        return spec
    phase = np.exp(1j * t * np.asarray(dr(spec.grid.frequencies), dtype=float))
    return Spectrum(spec.grid, spec.coefficients * phase)


def _index_window(
    grid: Grid,
    frequency_range: Tuple[float, float],
    band: Optional[Tuple[int, int]],
) -> Optional[Tuple[int, int]]:
    if band is None:
        return None
    half = grid.n_points // 2
    step = grid.frequency_step
    lo = math.ceil(frequency_range[0] / step - 1e-9) + half
    hi = math.floor(frequency_range[1] / step + 1e-9) + half
    lo = max(lo, band[0], 0)
    hi = min(hi, band[1], grid.n_points - 1)
    if lo > hi:
        return None
    return lo, hi


def apply_bilinear_multiplier(
    m: BilinearSymbol, f: Spectrum, g: Spectrum
) -> Spectrum:
    """Bilinear multiplier T_m(f, g) with output (2 pi)^(-1/2) dxi sum_eta mu f_hat g_hat.

    Only the symbol box intersected with the spectral bands of f and g is
    visited; an output frequency outside the grid is rejected as aliasing.
    """
    _require_same_grid(f.grid, g.grid)
    grid = f.grid
    n_points = grid.n_points
    half = n_points // 2
    output = np.zeros(n_points, dtype=complex)

    rows = _index_window(grid, (m.box.xi_min, m.box.xi_max), f.band())
    cols = _index_window(grid, (m.box.eta_min, m.box.eta_max), g.band())
    if rows is None or cols is None:
        return Spectrum(grid, output, 0.0)

    row_lo, row_hi = rows
    col_lo, col_hi = cols
    out_lo = row_lo + col_lo - half
    out_hi = row_hi + col_hi - half
    if out_lo < 0 or out_hi >= n_points:
        freqs = grid.frequencies
        raise AliasingError(
            "bilinear output band "
            f"[{freqs[row_lo] + freqs[col_lo]:.6g}, {freqs[row_hi] + freqs[col_hi]:.6g}]"
            f" exceeds the Nyquist box of +-{grid.max_frequency:.6g}"
        )

    freqs = grid.frequencies
    xi = freqs[row_lo : row_hi + 1]
    eta = freqs[col_lo : col_hi + 1]
    f_part = f.coefficients[row_lo : row_hi + 1]
    g_part = g.coefficients[col_lo : col_hi + 1]
    width = eta.size
    log_debug(f"bilinear multiplier over {xi.size}x{width} frequency pairs")

    for start in range(0, xi.size, ROW_CHUNK):
        stop = min(start + ROW_CHUNK, xi.size)
        block = m(xi[start:stop, None], eta[None, :])
        block = block * (f_part[start:stop, None] * g_part[None, :])
        for offset, row in enumerate(block):
            k = row_lo + start + offset + col_lo - half
            output[k : k + width] += row

    output *= grid.frequency_step / SQRT_2PI
    return Spectrum(grid, output)


def localization_defect(state: SampledState) -> float:
    """Fraction of L^2 mass outside the central half |x| < L/4."""
    density = np.abs(state.values) ** 2
    total = float(density.sum())
    if total == 0.0:
        return 0.0
    outer = np.abs(state.grid.positions) >= 0.25 * state.grid.length
    return float(density[outer].sum()) / total


def is_localized(
    state: SampledState, tolerance: float = LOCALIZATION_TOLERANCE
) -> bool:
    return localization_defect(state) <= tolerance


def norm(state: SampledState, spec: NormSpec) -> float:
    """Riemann-sum L^q norm, grid max for q = inf, or weighted L^2 norm."""
    magnitude = np.abs(state.values)
    spacing = state.grid.spacing
    if spec.kind == "lebesgue":
        if math.isinf(spec.q):
            return float(magnitude.max())
        return float((spacing * np.sum(magnitude**spec.q)) ** (1.0 / spec.q))

    defect = localization_defect(state)
    if defect > LOCALIZATION_TOLERANCE:
        log_warning(
            f"weighted norm unreliable: {defect:.2e} of the mass lies near the "
            "periodic boundary"
        )
    weight = (1.0 + state.grid.positions**2) ** spec.s
    return float(np.sqrt(spacing * np.sum(weight * magnitude**2)))


def mass_centroid(state: SampledState) -> float:
    """Centre of mass of |u|^2 in the centred chart."""
    density = np.abs(state.values) ** 2
    total = float(density.sum())
    if total == 0.0:
        raise LabConfigurationError("centroid of a zero state is undefined")
    return float(np.sum(state.grid.positions * density) / total)


def _normalized(grid: Grid, values: np.ndarray, width: float) -> SampledState:
    mass = math.sqrt(grid.spacing * float(np.sum(np.abs(values) ** 2)))
    if mass == 0.0:
        raise ResolutionError("witness vanishes on the grid")
    return SampledState(grid, values / mass, width)


def make_witness(
    kind: WitnessKind,
    center_x: float,
    center_freq: float,
    width: float,
    grid: Grid,
) -> SampledState:
    """Unit-L^2 witness data.

    gaussian: spatial standard width `width`, modulated to `center_freq`.
    flat_spectrum: smoothed indicator of [center_freq - width, center_freq + width].
    band_bump: smooth bump of frequency radius `width` around `center_freq`.
    """
    if kind not in WITNESS_KINDS:
        raise LabConfigurationError(f"unknown witness kind {kind!r}")
    if not width > 0:
        raise LabConfigurationError("witness width must be positive")

    if kind == "gaussian":
        if width < 2.0 * grid.spacing:
            raise ResolutionError(
                f"gaussian width {width:g} below twice the spacing {grid.spacing:g}"
            )
        if abs(center_freq) + 8.0 / width >= grid.max_frequency:
            raise ResolutionError(
                f"gaussian spectrum around {center_freq:g} reaches the Nyquist "
                f"frequency {grid.max_frequency:g}"
            )
        x = grid.positions
        values = np.exp(-((x - center_x) ** 2) / (2.0 * width**2)) * np.exp(
            1j * center_freq * x
        )
        return _normalized(grid, values, width)

    if width < 2.0 * grid.frequency_step:
        raise ResolutionError(
            f"frequency width {width:g} below twice the frequency step "
            f"{grid.frequency_step:g}"
        )
    if abs(center_freq) + 1.5 * width >= grid.max_frequency:
        raise ResolutionError(
            f"band around {center_freq:g} reaches the Nyquist frequency"
        )

    xi = grid.frequencies
    if kind == "flat_spectrum":
        edge = 0.2 * width
        profile = 0.5 * (
            erf((xi - (center_freq - width)) / edge)
            - erf((xi - (center_freq + width)) / edge)
        )
    else:
        profile = bump((xi - center_freq) / width)
    coefficients = profile * np.exp(-1j * center_x * xi)
    declared = abs(center_freq) + 1.5 * width
    state = inverse_transform(Spectrum(grid, coefficients, declared))
    return _normalized(grid, state.values, 1.0 / width)
