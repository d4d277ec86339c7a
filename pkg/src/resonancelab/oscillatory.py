"""
One-dimensional oscillatory integrals with boundary stationary points.

Transition functions

    G1(x) = int_x^inf exp(i s^2) ds
    G2(x) = int_x^inf exp(i s^2) / sqrt(s - x) ds

together with their large-|x| expansions, the leading terms of half-line
integrals int e^{i t zeta} chi w, and a panel quadrature oracle that
evaluates those integrals directly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Literal, NamedTuple, Tuple

import numpy as np
from agno.utils.log import log_debug
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import fresnel

from .config import DEFAULT_SETTINGS, LabSettings
from .dispersion_geometry import DispersionRelation
from .errors import AccuracyError, HypothesisError, LabConfigurationError
from .spectral_core import bump

WeightKind = Literal["none", "inv_sqrt_sigma", "inv_sqrt_sigma_minus_eps"]
LeadingCase = Literal["B2_i", "B2_ii", "B2_iii", "B2_iv", "B3_i", "B3_ii", "B3_iii"]

LEADING_CASES: Tuple[str, ...] = (
    "B2_i",
    "B2_ii",
    "B2_iii",
    "B2_iv",
    "B3_i",
    "B3_ii",
    "B3_iii",
)
MAX_ARGUMENT = 1e4
MAX_TIME = 1e5
GAUSS_NODES = 16
PANEL_PHASE = math.pi / 4
MIN_PANELS = 16
MAX_ROUNDS = 24
HYPOTHESIS_FLOOR = 1e-8

C0 = (1 + 1j) * math.sqrt(math.pi / 2)
C_PLUS = C0 / 2
C_MINUS = C_PLUS.conjugate()

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_NODES)


@dataclass(frozen=True)
class SpecialConstants:
    C0: complex
    C_plus: complex
    C_minus: complex


def _complex_quad(
    fn: Callable[[float], complex], a: float, b: float, limit: int = 400
) -> complex:
    real = quad(lambda s: fn(s).real, a, b, epsabs=1e-13, epsrel=1e-12, limit=limit)
    imag = quad(lambda s: fn(s).imag, a, b, epsabs=1e-13, epsrel=1e-12, limit=limit)
    return complex(real[0], imag[0])


def quadrature_constants() -> SpecialConstants:
    """Fresnel constants integrated along the steepest-descent rays."""
    half_line = quad(lambda r: math.exp(-r * r), 0.0, np.inf)[0]
    c_plus = cmath.exp(0.25j * math.pi) * half_line
    c_minus = cmath.exp(-0.25j * math.pi) * half_line
    full_line = quad(lambda r: math.exp(-r * r), -np.inf, np.inf)[0]
    c0 = cmath.exp(0.25j * math.pi) * full_line
    return SpecialConstants(c0, c_plus, c_minus)


def _check_argument(x) -> None:
    if np.any(np.abs(np.asarray(x, dtype=float)) > MAX_ARGUMENT):
        raise LabConfigurationError(f"|x| must not exceed {MAX_ARGUMENT:g}")


def fresnel_g1(x):
    """G1(x) = C_plus - int_0^x exp(i s^2) ds, through the Fresnel integrals."""
    _check_argument(x)
    x = np.asarray(x, dtype=float)
    scale = math.sqrt(math.pi / 2)
    s, c = fresnel(x / scale)
    value = C_PLUS - scale * (c + 1j * s)
    return complex(value) if value.ndim == 0 else value


def g1_asymptotic(x, terms: int = 1):
    """Large-|x| expansion of G1 from repeated integration by parts."""
    if terms not in (1, 2):
        raise LabConfigurationError("terms must be 1 or 2")

    def positive(y: float) -> complex:
        phase = cmath.exp(1j * y * y)
        value = -phase / (2j * y)
        if terms == 2:
            value += phase / (4 * y**3)
        return value

    def single(y: float) -> complex:
        if y == 0:
            raise LabConfigurationError("the expansion is not defined at 0")
        return positive(y) if y > 0 else C0 - positive(-y)

    if np.ndim(x):
        return np.array([single(float(y)) for y in np.ravel(x)]).reshape(np.shape(x))
    return single(float(x))


def _quartic_cutoff(c: float) -> float:
    """rho_max with rho^4 + c rho^2 = 50."""
    return math.sqrt((-c + math.sqrt(c * c + 200.0)) / 2.0)


def _g2_single(x: float) -> complex:
    root2 = math.sqrt(2.0)
    outer = cmath.exp(1j * x * x)
    if x >= -2.0:
        c = root2 * x

        def rotated(rho: float) -> complex:
            r2 = rho * rho
            return math.exp(-r2 * r2 - c * r2) * cmath.exp(1j * c * r2)

        integral = _complex_quad(rotated, 0.0, _quartic_cutoff(c))
        return 2.0 * cmath.exp(1j * math.pi / 8) * outer * integral

    c = root2 * abs(x)

    def descending(rho: float) -> complex:
        r2 = rho * rho
        return math.exp(-r2 * r2 - c * r2) * cmath.exp(1j * c * r2)

    endpoint = (
        2.0
        * cmath.exp(-3j * math.pi / 8)
        * outer
        * _complex_quad(descending, 0.0, _quartic_cutoff(c))
    )
    ray = cmath.exp(0.25j * math.pi)

    def saddle(s: float) -> complex:
        return math.exp(-s * s) / cmath.sqrt(s * ray + abs(x))

    return endpoint + ray * _complex_quad(saddle, -8.0, 8.0)


def fresnel_g2(x):
    """G2(x) through tau = sqrt(s - x) and a rotated integration path."""
    _check_argument(x)
    if np.ndim(x):
        return np.array([_g2_single(float(y)) for y in np.ravel(x)]).reshape(
            np.shape(x)
        )
    return _g2_single(float(x))


def g2_asymptotic(x):
    """Large-|x| expansion of G2: one term for x > 0, two for x < 0."""

    def single(y: float) -> complex:
        if y == 0:
            raise LabConfigurationError("the expansion is not defined at 0")
        phase = cmath.exp(1j * y * y)
        if y > 0:
            return C_PLUS * phase * math.sqrt(2.0 / y)
        return C_MINUS * phase * math.sqrt(2.0 / -y) + math.sqrt(
            math.pi
        ) * cmath.exp(0.25j * math.pi) / math.sqrt(-y)

    if np.ndim(x):
        return np.array([single(float(y)) for y in np.ravel(x)]).reshape(np.shape(x))
    return single(float(x))


@dataclass(frozen=True)
class BumpAmplitude:
    """chi(s) = height * bump((s - center) / radius)."""

    center: float = 0.0
    radius: float = 1.0
    height: float = 1.0

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise LabConfigurationError("amplitude radius must be positive")

    def __call__(self, sigma):
        return self.height * bump((np.asarray(sigma) - self.center) / self.radius)

    @property
    def support(self) -> Tuple[float, float]:
        return self.center - self.radius, self.center + self.radius


@dataclass(frozen=True)
class OscIntegralSpec:
    """int_lower^inf exp(i t zeta(s)) chi(s) w(s) ds."""

    phase: DispersionRelation
    amplitude: BumpAmplitude
    t: float
    weight: WeightKind = "none"
    lower_limit: float = 0.0
    eps: float = 0.0

    def __post_init__(self) -> None:
        if self.weight not in ("none", "inv_sqrt_sigma", "inv_sqrt_sigma_minus_eps"):
            raise LabConfigurationError(f"unknown weight {self.weight!r}")
        if not self.t > 0:
            raise LabConfigurationError("t must be positive")
        if self.lower_limit < 0:
            raise LabConfigurationError("lower_limit must be non-negative")
        if self.weight == "inv_sqrt_sigma" and self.lower_limit != 0.0:
            raise LabConfigurationError("the 1/sqrt(s) weight needs lower_limit 0")
        if self.weight == "inv_sqrt_sigma_minus_eps" and self.lower_limit != self.eps:
            raise LabConfigurationError(
                "the 1/sqrt(s - eps) weight needs lower_limit equal to eps"
            )

    @property
    def singular(self) -> bool:
        return self.weight != "none"

    def with_time(self, t: float) -> "OscIntegralSpec":
        return OscIntegralSpec(
            self.phase, self.amplitude, t, self.weight, self.lower_limit, self.eps
        )


def _gauss(fn: Callable[[np.ndarray], np.ndarray], a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = mid[:, None] + half[:, None] * _NODES[None, :]
    return half * (fn(nodes) @ _WEIGHTS)


def _initial_edges(rate: Callable[[np.ndarray], np.ndarray], top: float) -> np.ndarray:
    samples = 4097
    for _ in range(2):
        tau = np.linspace(0.0, top, samples)
        r = np.abs(rate(tau))
        variation = np.concatenate(
            ([0.0], np.cumsum(0.5 * (r[1:] + r[:-1]) * np.diff(tau)))
        )
        level = variation / PANEL_PHASE + MIN_PANELS * tau / top
        count = int(math.ceil(level[-1]))
        if 8 * count + 1 <= samples:
            break
        samples = 8 * count + 1
    return np.interp(np.linspace(0.0, level[-1], count + 1), level, tau)


def oracle_integral(
    spec: OscIntegralSpec,
    halve: bool = False,
    settings: LabSettings = DEFAULT_SETTINGS,
) -> complex:
    """Adaptive Gauss-Legendre panels after s = lower + tau^2.

    Panels start at a phase variation of pi/4 each and are halved until the
    panel-halving error estimate meets the target.
    """
    if spec.t > MAX_TIME:
        raise LabConfigurationError(f"t must not exceed {MAX_TIME:g}")
    lower = spec.lower_limit
    top_sigma = spec.amplitude.support[1]
    if spec.amplitude.height == 0.0 or top_sigma <= lower:
        return 0j
    top = math.sqrt(top_sigma - lower)
    t = spec.t
    zeta = spec.phase

    def integrand(tau: np.ndarray) -> np.ndarray:
        sigma = lower + tau * tau
        jacobian = 2.0 if spec.singular else 2.0 * tau
        return np.exp(1j * t * zeta(sigma)) * spec.amplitude(sigma) * jacobian

    def rate(tau: np.ndarray) -> np.ndarray:
        return t * zeta.derivative(lower + tau * tau, 1) * 2.0 * tau

    edges = _initial_edges(rate, top)
    if halve:
        mids = 0.5 * (edges[1:] + edges[:-1])
        edges = np.sort(np.concatenate((edges, mids)))
    a, b = edges[:-1], edges[1:]
    target = settings.oracle_target
    accepted = 0j
    accepted_error = 0.0
    for _ in range(MAX_ROUNDS):
        mid = 0.5 * (a + b)
        coarse = _gauss(integrand, a, b)
        fine = _gauss(integrand, a, mid) + _gauss(integrand, mid, b)
        error = np.abs(coarse - fine)
        good = error <= target * (b - a) / top
        accepted += complex(fine[good].sum())
        accepted_error += float(error[good].sum())
        if np.all(good):
            log_debug(f"oracle converged, error estimate {accepted_error:.2e}")
            return accepted
        bad = ~good
        a = np.concatenate((a[bad], mid[bad]))
        b = np.concatenate((mid[bad], b[bad]))
        remainder = complex(fine[bad].sum())
        remainder_error = float(error[bad].sum())
    estimate = accepted_error + remainder_error
    if estimate <= target:
        return accepted + remainder
    raise AccuracyError(estimate, target)


class LeadingTerm(NamedTuple):
    value: complex
    error_order: float
    branch: str = ""


def _stationary_point(spec: OscIntegralSpec) -> float:
    lo, hi = spec.amplitude.support
    grid = np.linspace(lo, hi, 2049)
    slope = spec.phase.derivative(grid, 1)
    if np.any(slope == 0.0):
        return float(grid[np.flatnonzero(slope == 0.0)[0]])
    changes = np.flatnonzero(np.sign(slope[:-1]) != np.sign(slope[1:]))
    if changes.size == 0:
        raise HypothesisError("zeta' vanishes on the amplitude support")
    k = int(changes[0])
    return float(
        brentq(
            lambda s: float(spec.phase.derivative(s, 1)),
            grid[k],
            grid[k + 1],
            xtol=1e-14,
        )
    )


def _second_derivative_bounds(spec: OscIntegralSpec) -> Tuple[float, float]:
    lo, hi = spec.amplitude.support
    grid = np.linspace(max(lo, spec.lower_limit), hi, 2049)
    curvature = spec.phase.derivative(grid, 2)
    return float(curvature.min()), float(curvature.max())


def _require_weight(spec: OscIntegralSpec, weight: str, case: str) -> None:
    if spec.weight != weight:
        raise HypothesisError(f"{case} needs weight {weight}", f"got {spec.weight}")


def _require_phase(spec: OscIntegralSpec, coefficients: Tuple[float, ...], case: str):
    if spec.phase.coefficients != coefficients:
        raise HypothesisError(
            f"{case} needs zeta with coefficients {coefficients}",
            f"got {spec.phase.coefficients}",
        )


def _endpoint_term(spec: OscIntegralSpec) -> complex:
    zeta = spec.phase
    slope = float(zeta.derivative(0.0, 1))
    if abs(slope) <= HYPOTHESIS_FLOOR:
        raise HypothesisError("zeta'(0) != 0")
    constant = C0 if slope > 0 else C0.conjugate()
    return (
        complex(spec.amplitude(0.0))
        * cmath.exp(1j * spec.t * float(zeta(0.0)))
        * constant
        / math.sqrt(spec.t * abs(slope))
    )


def _regime_branch(scaled: float) -> Tuple[float, str]:
    if abs(scaled) < 1.0:
        return -0.75, "inner"
    return -0.5, "outer"


def leading_term(spec: OscIntegralSpec, case: LeadingCase) -> LeadingTerm:
    """Leading asymptotic term of the integral and the claimed remainder exponent in t."""
    if case not in LEADING_CASES:
        raise LabConfigurationError(f"unknown case {case!r}")
    t = spec.t
    zeta = spec.phase
    chi = spec.amplitude
    sqrt_t = math.sqrt(t)

    if case == "B3_i":
        _require_weight(spec, "none", case)
        _require_phase(spec, (0.0, 0.0, 1.0), case)
        value = complex(chi(0.0)) * fresnel_g1(sqrt_t * spec.lower_limit) / sqrt_t
        return LeadingTerm(value, -1.0)

    if case == "B3_ii":
        _require_weight(spec, "inv_sqrt_sigma", case)
        _require_phase(spec, (0.0, 1.0), case)
        return LeadingTerm(C0 * complex(chi(0.0)) / sqrt_t, -1.0)

    if case == "B3_iii":
        _require_weight(spec, "inv_sqrt_sigma_minus_eps", case)
        _require_phase(spec, (0.0, 0.0, 1.0), case)
        scaled = sqrt_t * spec.eps
        order, branch = _regime_branch(scaled)
        value = complex(chi(0.0)) * fresnel_g2(scaled) / t**0.25
        return LeadingTerm(value, order, branch)

    if case == "B2_ii":
        _require_weight(spec, "inv_sqrt_sigma", case)
        lo, hi = chi.support
        grid = np.linspace(max(lo, 0.0), hi, 2049)
        if float(np.min(np.abs(zeta.derivative(grid, 1)))) <= HYPOTHESIS_FLOOR:
            raise HypothesisError("|zeta'| >= c > 0 on the amplitude support")
        return LeadingTerm(_endpoint_term(spec), -1.0)

    low, high = _second_derivative_bounds(spec)
    if case == "B2_iii":
        _require_weight(spec, "inv_sqrt_sigma", case)
        if min(abs(low), abs(high)) <= HYPOTHESIS_FLOOR or low * high < 0:
            raise HypothesisError("|zeta''| >= c > 0 on the amplitude support")
        sigma0 = _stationary_point(spec)
        if sigma0 <= HYPOTHESIS_FLOOR:
            raise HypothesisError("stationary point sigma0 > 0", f"sigma0={sigma0:g}")
        curvature = float(zeta.derivative(sigma0, 2))
        rho = 1.0 if curvature > 0 else -1.0
        interior = (
            math.sqrt(2 * math.pi)
            * cmath.exp(1j * t * float(zeta(sigma0)))
            * cmath.exp(0.25j * math.pi * rho)
            * complex(chi(sigma0))
            / math.sqrt(sigma0 * abs(curvature))
            / sqrt_t
        )
        return LeadingTerm(_endpoint_term(spec) + interior, -1.0)

    if low <= HYPOTHESIS_FLOOR:
        raise HypothesisError("zeta'' >= c > 0 on the amplitude support")
    sigma0 = _stationary_point(spec)
    curvature = float(zeta.derivative(sigma0, 2))
    lower = spec.lower_limit
    rise = max(float(zeta(lower)) - float(zeta(sigma0)), 0.0)
    y0 = math.copysign(math.sqrt(rise), lower - sigma0) if rise else 0.0
    carrier = cmath.exp(1j * t * float(zeta(sigma0)))

    if case == "B2_i":
        _require_weight(spec, "none", case)
        value = (
            carrier
            * complex(chi(sigma0))
            * math.sqrt(2.0 / curvature)
            * fresnel_g1(sqrt_t * y0)
            / sqrt_t
        )
        return LeadingTerm(value, -1.0)

    # B2_iv
    _require_weight(spec, "inv_sqrt_sigma", case)
    slope = float(zeta.derivative(0.0, 1))
    if abs(y0) > 1e-7 and abs(slope) > HYPOTHESIS_FLOOR:
        jacobian = 2.0 * y0 / slope
    else:
        jacobian = math.sqrt(2.0 / curvature)
    order, branch = _regime_branch(sqrt_t * y0)
    value = (
        carrier
        * complex(chi(0.0))
        * math.sqrt(jacobian)
        * fresnel_g2(sqrt_t * y0)
        / t**0.25
    )
    return LeadingTerm(value, order, branch)


class LeadingComparison(NamedTuple):
    case: str
    t: float
    oracle: complex
    leading: complex
    error_order: float
    branch: str

    @property
    def remainder(self) -> float:
        return abs(self.oracle - self.leading)


def reference_spec(case: LeadingCase, t: float = 100.0) -> OscIntegralSpec:
    """A fixed integral satisfying the hypotheses of `case`."""
    square = DispersionRelation((0.0, 0.0, 1.0))
    unit = BumpAmplitude(0.0, 1.0)
    centred = BumpAmplitude(0.5, 1.0)
    well = DispersionRelation((0.25, -1.0, 1.0))
    if case == "B3_i":
        return OscIntegralSpec(square, unit, t, "none", 0.2)
    if case == "B3_ii":
        return OscIntegralSpec(DispersionRelation((0.0, 1.0)), unit, t, "inv_sqrt_sigma")
    if case == "B3_iii":
        return OscIntegralSpec(square, unit, t, "inv_sqrt_sigma_minus_eps", 0.5, 0.5)
    if case == "B2_i":
        return OscIntegralSpec(well, centred, t)
    if case == "B2_ii":
        return OscIntegralSpec(DispersionRelation((1.0, 1.0)), unit, t, "inv_sqrt_sigma")
    if case == "B2_iii":
        return OscIntegralSpec(well, centred, t, "inv_sqrt_sigma")
    if case == "B2_iv":
        return OscIntegralSpec(
            DispersionRelation((0.09, -0.6, 1.0)),
            BumpAmplitude(0.3, 1.0),
            t,
            "inv_sqrt_sigma",
        )
    raise LabConfigurationError(f"unknown case {case!r}")


def compare_leading_term(
    spec: OscIntegralSpec,
    case: LeadingCase,
    settings: LabSettings = DEFAULT_SETTINGS,
) -> LeadingComparison:
    """Oracle value next to the leading term for one integral."""
    leading = leading_term(spec, case)
    oracle = oracle_integral(spec, settings=settings)
    return LeadingComparison(
        case, spec.t, oracle, leading.value, leading.error_order, leading.branch
    )
