"""
Inhomogeneous evolution u(t) = T_t(f, g) and its asymptotic predictors.

    T_t(f, g) = -i exp(i t a(D)) int_0^t T_{m exp(i s phi)}(f, g) ds

`evolve` integrates in s exactly through the Duhamel symbol;
`evolve_quadrature` is the independent route with a composite Simpson rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from agno.utils.log import log_debug, log_info

from .config import DEFAULT_SETTINGS, LabSettings
from .dispersion_geometry import (
    DispersionTriple,
    ResonanceGeometry,
    ResonantPoint,
    analyze_geometry,
    eval_phase,
    field_extrema,
    preset_triple,
    space_resonance_field,
)
from .errors import (
    HypothesisError,
    LabConfigurationError,
    ResolutionError,
    WrapAroundError,
)
from .oscillatory import fresnel_g1, fresnel_g2
from .spectral_core import (
    BilinearSymbol,
    Box,
    Grid,
    NormSpec,
    SampledState,
    Spectrum,
    apply_bilinear_multiplier,
    apply_linear_group,
    inverse_transform,
    make_witness,
    norm,
    transform,
)

EvolutionMethod = Literal["symbol_form", "time_quadrature"]
ProfileRegion = Literal[
    "before_resonance", "edge_zero", "interior", "edge_one", "beyond_resonance"
]
PROFILE_REGIONS: Tuple[str, ...] = (
    "before_resonance",
    "edge_zero",
    "interior",
    "edge_one",
    "beyond_resonance",
)
SQRT_2PI = math.sqrt(2.0 * math.pi)
WRAP_MARGIN = 10.0
DEFAULT_WIDTH = 4.0

# (center in input coordinates, radius) of the symbol bump for each preset
PRESET_SUPPORTS: Dict[str, Tuple[Tuple[float, float], float]] = {
    "schrodinger": ((0.5, 0.0), 0.3),
    "schrodinger_shifted": ((1 / math.sqrt(2), 1 / math.sqrt(2)), 0.25),
    "gap": ((0.5, 0.5), 0.5),
    "definite": ((0.0, 0.0), 0.3),
    "tilted": ((1.0, -1.0 / 3.0), 0.3),
}


@dataclass(frozen=True, eq=False)
class Scenario:
    """One experimental unit: dispersion triple, symbol, data and grid."""

    triple: DispersionTriple
    symbol: BilinearSymbol
    f: SampledState
    g: SampledState
    geometry: ResonanceGeometry
    label: str = "scenario"
    t_max: float = 0.0

    def __post_init__(self) -> None:
        if self.f.grid != self.g.grid:
            raise LabConfigurationError("f and g must share a grid")
        box = self.symbol.box
        limit = self.grid.max_frequency
        lo, hi = box.sum_range()
        extent = max(
            abs(box.xi_min), abs(box.xi_max), abs(box.eta_min), abs(box.eta_max)
        )
        if max(extent, abs(lo), abs(hi)) >= limit:
            raise ResolutionError(
                f"symbol support of scenario {self.label!r} reaches the Nyquist "
                f"frequency {limit:g}"
            )
        self.check_time(self.t_max)

    @property
    def grid(self) -> Grid:
        return self.f.grid

    @cached_property
    def f_hat(self) -> Spectrum:
        return transform(self.f)

    @cached_property
    def g_hat(self) -> Spectrum:
        return transform(self.g)

    @cached_property
    def v_max(self) -> float:
        return self.triple.max_speed(self.symbol.box)

    @property
    def spatial_margin(self) -> float:
        widths = [w for w in (self.f.width, self.g.width) if w]
        return WRAP_MARGIN * (max(widths) if widths else 1.0)

    def required_length(self, t: float) -> float:
        return 2.0 * self.v_max * t + self.spatial_margin

    @property
    def t_budget(self) -> float:
        if self.v_max == 0.0:
            return math.inf
        return (self.grid.length - self.spatial_margin) / (2.0 * self.v_max)

    def check_time(self, t: float) -> None:
        if t < 0:
            raise LabConfigurationError("t must be non-negative")
        if t > self.t_budget:
            raise WrapAroundError(t, self.required_length(t), self.grid.length)

    @cached_property
    def phase_bounds(self) -> Tuple[float, float]:
        """(min |phi|, sup |phi|) on the symbol support."""
        return field_extrema(self.triple.phi, self.symbol.box)

    @property
    def classification_tag(self) -> str:
        if self.geometry.classification is None:
            raise HypothesisError("scenario geometry is classified")
        return self.geometry.classification.tag


def choose_grid(
    triple: DispersionTriple,
    box: Box,
    width: float,
    t_max: float,
    spacing: float = 1.0,
) -> Grid:
    """Smallest power-of-two grid that resolves the data and holds u up to t_max."""
    lo, hi = box.sum_range()
    reach = max(
        abs(lo),
        abs(hi),
        abs(box.xi_min) + 8.0 / width,
        abs(box.xi_max) + 8.0 / width,
        abs(box.eta_min) + 8.0 / width,
        abs(box.eta_max) + 8.0 / width,
    )
    while math.pi / spacing <= 1.25 * reach:
        spacing /= 2.0
    required = 2.0 * triple.max_speed(box) * t_max + WRAP_MARGIN * width
    n_points = 1 << max(6, math.ceil(math.log2(max(required / spacing, 2.0))))
    return Grid(n_points, n_points * spacing)


def build_scenario(
    triple: DispersionTriple,
    symbol: BilinearSymbol,
    f: SampledState,
    g: SampledState,
    label: str = "scenario",
    t_max: float = 0.0,
    resolution: int = 256,
    settings: LabSettings = DEFAULT_SETTINGS,
) -> Scenario:
    """Assemble a scenario and classify its geometry on the symbol support."""
    box = symbol.box
    trace_box = box.expanded(0.05 * box.diagonal)
    geometry = analyze_geometry(triple, trace_box, box, resolution, settings)
    log_info(
        f"scenario {label}: {geometry.classification.tag}, "  # type: ignore[union-attr]
        f"{len(geometry.points)} resonant point(s)"
    )
    return Scenario(triple, symbol, f, g, geometry, label, t_max)


def preset_scenario(
    name: str,
    kappa: float = 1.0,
    t_max: float = 500.0,
    width: float = DEFAULT_WIDTH,
    center: Optional[Tuple[float, float]] = None,
    radius: Optional[float] = None,
    grid: Optional[Grid] = None,
    data_kind: str = "gaussian",
    resolution: int = 256,
    label: Optional[str] = None,
    settings: LabSettings = DEFAULT_SETTINGS,
) -> Scenario:
    """Preset triple, radial bump symbol and witness data centred on the symbol.

    For gaussian data `width` is the spatial width; for the spectral witnesses
    it is the frequency half-width.
    """
    triple = preset_triple(name, kappa)
    default_center, default_radius = PRESET_SUPPORTS[name]
    if name == "schrodinger_shifted" and center is None:
        root = math.sqrt(kappa / 2.0)
        default_center = (root, root)
    center = center or default_center
    radius = radius or default_radius
    symbol = BilinearSymbol.radial_bump(center, radius)
    spatial = width if data_kind == "gaussian" else 1.0 / width
    if grid is None:
        grid = choose_grid(triple, symbol.box, spatial, t_max)
    f = make_witness(data_kind, 0.0, center[0], width, grid)  # type: ignore[arg-type]
    g = make_witness(data_kind, 0.0, center[1], width, grid)  # type: ignore[arg-type]
    return build_scenario(
        triple, symbol, f, g, label or name, t_max, resolution, settings
    )


def duhamel_symbol(
    triple: DispersionTriple, m: BilinearSymbol, t: float
) -> BilinearSymbol:
    """-i t e^{ita(xi+eta)} m e^{it phi/2} sinc(t phi/2), i.e. -e^{ita} m (e^{it phi}-1)/phi."""
    if t < 0:
        raise LabConfigurationError("t must be non-negative")

    def factor(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        phase = triple.phi(xi, eta)
        return (
            -1j
            * t
            * np.exp(1j * t * triple.a(xi + eta))
            * np.exp(0.5j * t * phase)
            * np.sinc(t * phase / (2.0 * math.pi))
        )

    return m.with_factor(factor, t * m.sup_bound, f"Duhamel symbol at t={t:g}")


def _zero(sc: Scenario) -> Spectrum:
    return Spectrum(sc.grid, np.zeros(sc.grid.n_points, dtype=complex), 0.0)


def evolve(sc: Scenario, t: float) -> Spectrum:
    """u_hat(t) through the exact-in-s Duhamel symbol."""
    sc.check_time(t)
    if t == 0:
        return _zero(sc)
    return apply_bilinear_multiplier(
        duhamel_symbol(sc.triple, sc.symbol, t), sc.f_hat, sc.g_hat
    )


def minimum_steps(sc: Scenario, t: float) -> int:
    """Smallest even Simpson step count resolving e^{i s phi} on [0, t]."""
    sup_phi = sc.phase_bounds[1]
    steps = max(2, math.ceil(4.0 * t * sup_phi / math.pi))
    return steps + steps % 2


def evolve_quadrature(
    sc: Scenario, t: float, n_steps: Optional[int] = None
) -> Spectrum:
    """Composite Simpson rule in s over e^{i(t-s)a(D)} T_m(e^{isb(D)}f, e^{isc(D)}g)."""
    sc.check_time(t)
    if t == 0:
        return _zero(sc)
    required = minimum_steps(sc, t)
    if n_steps is None:
        n_steps = 4 * required
    if n_steps < required or n_steps % 2:
        raise LabConfigurationError(
            f"n_steps={n_steps} under-resolves t={t:g}; use an even count of at "
            f"least {required}"
        )
    h = t / n_steps
    total = np.zeros(sc.grid.n_points, dtype=complex)
    for k in range(n_steps + 1):
        s = k * h
        weight = 1.0 if k in (0, n_steps) else (4.0 if k % 2 else 2.0)
        product = apply_bilinear_multiplier(
            sc.symbol,
            apply_linear_group(sc.f_hat, sc.triple.b, s),
            apply_linear_group(sc.g_hat, sc.triple.c, s),
        )
        total += weight * apply_linear_group(product, sc.triple.a, t - s).coefficients
    log_debug(f"Simpson quadrature with {n_steps} steps at t={t:g}")
    return Spectrum(sc.grid, -1j * h / 3.0 * total)


def _divided_symbol(sc: Scenario) -> BilinearSymbol:
    low = sc.phase_bounds[0]

    def inverse_phase(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / sc.triple.phi(xi, eta)

    return sc.symbol.with_factor(inverse_phase, sc.symbol.sup_bound / low, "m/phi")


def predict_no_time_resonance(sc: Scenario, t: float) -> Tuple[Spectrum, Spectrum]:
    """Exact two-term identity when phi has no zero on the symbol support.

    Returns (u_hat(t), e^{ita(D)} T_{m/phi}(f, g)); the second item is the
    asymptotic profile.
    """
    if sc.classification_tag != "empty" or sc.phase_bounds[0] <= 0.0:
        raise HypothesisError("phi does not vanish on the symbol support")
    sc.check_time(t)
    divided = _divided_symbol(sc)
    profile = apply_bilinear_multiplier(divided, sc.f_hat, sc.g_hat)
    asymptotic = apply_linear_group(profile, sc.triple.a, t)
    transient = apply_bilinear_multiplier(
        divided,
        apply_linear_group(sc.f_hat, sc.triple.b, t),
        apply_linear_group(sc.g_hat, sc.triple.c, t),
    )
    return asymptotic - transient, asymptotic


def _require_no_space_resonance(sc: Scenario, settings: LabSettings) -> None:
    def field_fn(xi, eta):
        return space_resonance_field(sc.triple, xi, eta)

    low, high = field_extrema(field_fn, sc.symbol.box)
    if low <= settings.transversality_floor * max(1.0, high):
        raise HypothesisError("(d_xi - d_eta) phi does not vanish on the support")


def predict_truncated_duhamel(
    sc: Scenario,
    t: float,
    M: float,
    settings: LabSettings = DEFAULT_SETTINGS,
) -> Spectrum:
    """e^{i(t-M)a(D)} u(M): the Duhamel integral truncated to s in [0, M]."""
    _require_no_space_resonance(sc, settings)
    if not 0 <= M <= t:
        raise LabConfigurationError("M must lie in [0, t]")
    sc.check_time(t)
    return apply_linear_group(evolve(sc, M), sc.triple.a, t - M)


def truncation_residual(
    sc: Scenario,
    t: float,
    M: float,
    settings: LabSettings = DEFAULT_SETTINGS,
) -> float:
    """sqrt(t) * ||u(t) - prediction||_inf."""
    difference = evolve(sc, t) - predict_truncated_duhamel(sc, t, M, settings)
    return math.sqrt(t) * norm(inverse_transform(difference), NormSpec.lebesgue(math.inf))


@dataclass(frozen=True, eq=False)
class ProfilePrediction:
    """Piecewise profile of u(t, x) in the self-similar variable X = x/t."""

    t: float
    X_grid: np.ndarray
    sigma: np.ndarray
    region: np.ndarray
    amplitude: np.ndarray
    error_order: np.ndarray
    point: ResonantPoint
    A1: complex
    signature: np.ndarray

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.amplitude)

    def mask(self, region: str) -> np.ndarray:
        return self.region == region


def resonant_point(sc: Scenario) -> ResonantPoint:
    """The unique transversal space-time resonant point inside the symbol support."""
    if sc.classification_tag != "transversal_point_intersection":
        raise HypothesisError(
            "geometry is a transversal point intersection",
            f"classified {sc.classification_tag}",
        )
    inside = [
        p
        for p in sc.geometry.points
        if p.transversal and bool(sc.symbol.box.contains(*p.input_coordinates))
    ]
    if len(inside) != 1:
        raise HypothesisError(
            "a unique transversal resonant point on the support",
            f"found {len(inside)}",
        )
    return inside[0]


def dispersion_onset(sc: Scenario) -> float:
    """Time after which the packets meeting at the resonant point have dispersed.

    1 / (|Phi_etaeta| var), var being the spread in eta of |m f_hat g_hat|
    along the output frequency xi0. Before sqrt(t) clears this time the
    Sigma ~ 0 edge has not reached its t^(-1/4) law.
    """
    point = resonant_point(sc)
    box = sc.symbol.box
    freqs = sc.grid.frequencies
    inside = (freqs >= box.eta_min) & (freqs <= box.eta_max)
    eta = freqs[inside]
    first = point.xi0 - eta
    f_modulus = np.interp(
        first, freqs, np.abs(sc.f_hat.coefficients), left=0.0, right=0.0
    )
    weight = (
        np.abs(sc.symbol(first, eta))
        * f_modulus
        * np.abs(sc.g_hat.coefficients[inside])
    )
    total = float(weight.sum())
    if total == 0.0:
        raise HypothesisError(
            "data reach the resonant output frequency",
            "|m f_hat g_hat| vanishes along xi0",
        )
    mean = float(np.sum(weight * eta)) / total
    spread = float(np.sum(weight * (eta - mean) ** 2)) / total
    if spread == 0.0:
        raise ResolutionError("the resonant band spans a single frequency step")
    return 1.0 / (abs(point.phi_etaeta) * spread)


def sigma_of_X(sc: Scenario, point: ResonantPoint, X) -> np.ndarray:
    """Rescaled resonance time -(a'(xi0) + X) / Phi_xi(xi0, eta0)."""
    speed = float(sc.triple.a.derivative(point.xi0, 1))
    return -(speed + np.asarray(X, dtype=float)) / point.phi_xi


def hessian_signature(sc: Scenario, point: ResonantPoint, sigma: float) -> int:
    """Signature of Hess_{xi, eta, sigma} psi at (xi0, eta0, sigma)."""
    xi0, eta0 = point.xi0, point.eta0
    d_xx = float(sc.triple.big_phi(xi0, eta0, (2, 0)))
    d_xy = float(sc.triple.big_phi(xi0, eta0, (1, 1)))
    hessian = np.array(
        [
            [float(sc.triple.a.derivative(xi0, 2)) + sigma * d_xx, sigma * d_xy, point.phi_xi],
            [sigma * d_xy, sigma * point.phi_etaeta, 0.0],
            [point.phi_xi, 0.0, 0.0],
        ]
    )
    eigenvalues = np.linalg.eigvalsh(hessian)
    return int(np.sum(eigenvalues > 0) - np.sum(eigenvalues < 0))


def resonant_constant(sc: Scenario, point: ResonantPoint, signature: int) -> complex:
    """Interior amplitude constant A1 for the unitary normalization of T_m."""
    xi0, eta0 = point.xi0, point.eta0
    mu = complex(sc.symbol.output_symbol(np.float64(xi0), np.float64(eta0)))
    data = sc.f_hat.value_at(xi0 - eta0) * sc.g_hat.value_at(eta0)
    return (
        -1j
        * SQRT_2PI
        * np.exp(0.25j * math.pi * signature)
        * mu
        * data
        / (abs(point.phi_xi) * math.sqrt(abs(point.phi_etaeta)))
    )


def classify_sigma(sigma: np.ndarray, window: float) -> np.ndarray:
    regions = np.full(sigma.shape, "interior", dtype=object)
    regions[sigma < -window] = "before_resonance"
    regions[np.abs(sigma) <= window] = "edge_zero"
    regions[np.abs(sigma - 1.0) <= window] = "edge_one"
    regions[sigma > 1.0 + window] = "beyond_resonance"
    return regions


def predict_profile(
    sc: Scenario,
    t: float,
    X_grid: Sequence[float],
    envelopes: Tuple[float, float] = (1.0, 1.0),
    settings: LabSettings = DEFAULT_SETTINGS,
) -> ProfilePrediction:
    """Region map and leading amplitude of u(t, tX) around a transversal point.

    `envelopes` = (|A0|, |A2|) scales the edge shape functions; they are not
    available in closed form and come from `fit_edge_envelopes`.
    """
    if t <= 0:
        raise LabConfigurationError("t must be positive")
    point = resonant_point(sc)
    window = settings.regime_window
    X = np.asarray(X_grid, dtype=float)
    sigma = sigma_of_X(sc, point, X)
    regions = classify_sigma(sigma, window)
    amplitude = np.zeros(X.shape, dtype=complex)
    error_order = np.full(X.shape, -np.inf)
    signature = np.zeros(X.shape, dtype=int)
    sqrt_t = math.sqrt(t)
    a0, a2 = envelopes
    A1 = resonant_constant(sc, point, hessian_signature(sc, point, 0.5))

    for k, (x_value, s_value, region) in enumerate(zip(X, sigma, regions)):
        if region == "interior":
            signature[k] = hessian_signature(sc, point, float(s_value))
            constant = resonant_constant(sc, point, int(signature[k]))
            psi = eval_phase(
                sc.triple, "psi", (point.xi0, point.eta0), sigma=s_value, X=x_value
            )
            amplitude[k] = constant * np.exp(1j * t * psi) / math.sqrt(t * s_value)
            error_order[k] = -1.0
        elif region == "edge_zero":
            amplitude[k] = a0 * fresnel_g2(sqrt_t * s_value) / t**0.25
            error_order[k] = -0.75 if abs(sqrt_t * s_value) < 1.0 else -0.5
        elif region == "edge_one":
            amplitude[k] = a2 * fresnel_g1(sqrt_t * (s_value - 1.0)) / sqrt_t
            error_order[k] = -1.0

    return ProfilePrediction(
        t, X, sigma, regions, amplitude, error_order, point, A1, signature
    )


def sample_profile(
    sc: Scenario, t: float, padding_factor: int = 1
) -> Tuple[np.ndarray, np.ndarray]:
    """(X, |u(t, x)|) on the grid positions, X = x/t."""
    state = inverse_transform(evolve(sc, t), padding_factor)
    return state.grid.positions / t, np.abs(state.values)


def fit_edge_envelopes(
    sc: Scenario, t: float, settings: LabSettings = DEFAULT_SETTINGS
) -> Tuple[float, float]:
    """Least-squares moduli (|A0|, |A2|) of the edge shapes at a reference time."""
    X, modulus = sample_profile(sc, t)
    shapes = predict_profile(sc, t, X, (1.0, 1.0), settings)
    envelopes = []
    for region in ("edge_zero", "edge_one"):
        mask = shapes.mask(region)
        shape = np.abs(shapes.amplitude[mask])
        denominator = float(np.sum(shape**2))
        if denominator == 0.0:
            raise ResolutionError(f"no grid points fall in the {region} window")
        envelopes.append(float(np.sum(modulus[mask] * shape) / denominator))
    return envelopes[0], envelopes[1]


@dataclass(frozen=True, eq=False)
class EvolutionResult:
    times: np.ndarray
    spectra: Tuple[Spectrum, ...]
    norm_table: Dict[NormSpec, np.ndarray] = field(default_factory=dict)
    method: EvolutionMethod = "symbol_form"


def evolve_series(
    sc: Scenario,
    times: Sequence[float],
    norms: Sequence[NormSpec] = (),
    method: EvolutionMethod = "symbol_form",
    n_steps: Optional[int] = None,
) -> EvolutionResult:
    """Evolve to each time and tabulate the requested norms of u(t)."""
    spectra: List[Spectrum] = []
    table: Dict[NormSpec, List[float]] = {spec: [] for spec in norms}
    for t in times:
        if method == "symbol_form":
            spectrum = evolve(sc, float(t))
        elif method == "time_quadrature":
            spectrum = evolve_quadrature(sc, float(t), n_steps)
        else:
            raise LabConfigurationError(f"unknown evolution method {method!r}")
        spectra.append(spectrum)
        if norms:
            state = inverse_transform(spectrum)
            for spec in norms:
                table[spec].append(norm(state, spec))
    return EvolutionResult(
        np.asarray(times, dtype=float),
        tuple(spectra),
        {spec: np.asarray(values) for spec, values in table.items()},
        method,
    )


def relative_l2_distance(first: Spectrum, second: Spectrum) -> float:
    scale = max(first.l2_norm(), second.l2_norm())
    if scale == 0.0:
        return 0.0
    return (first - second).l2_norm() / scale
