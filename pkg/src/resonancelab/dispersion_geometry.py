"""
Dispersion relations, interaction phases and resonance geometry.

For a triple (a, b, c) the interaction phases are

    phi(xi, eta) = -a(xi + eta) + b(xi) + c(eta)          (input coordinates)
    Phi(xi, eta) = -a(xi) + b(xi - eta) + c(eta)          (output coordinates)

related by Phi(xi, eta) = phi(xi - eta, eta). The time resonance set is the
zero set of phi; the space resonance set is traced in input coordinates as the
zero set of (d_xi - d_eta) phi, which maps onto {Phi_eta = 0}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from agno.utils.log import log_debug, log_warning
from numpy.polynomial import Polynomial
from scipy.optimize import brentq
from skimage.measure import find_contours

from .config import DEFAULT_SETTINGS, LabSettings
from .errors import DegenerateGeometryError, LabConfigurationError
from .spectral_core import Box

PhaseName = Literal["phi", "Phi", "psi"]
GammaTag = Literal[
    "empty",
    "point_order2_definite",
    "curve_noncharacteristic",
    "curve_nonvanishing_curvature",
    "curve_general",
    "transversal_point_intersection",
    "mixed",
]
Direction = Literal["xi", "eta", "xi+eta"]
FieldFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]

MAX_DEGREE = 4
MAX_ORDER = 2
NEWTON_ITERATIONS = 50
NEWTON_STEP_TOLERANCE = 1e-12
DEGENERATE_FIELD = 1e-12
PRESET_NAMES: Tuple[str, ...] = (
    "schrodinger",
    "schrodinger_shifted",
    "gap",
    "definite",
    "tilted",
)


@dataclass(frozen=True, eq=False)
class DispersionRelation:
    """Real polynomial dispersion relation, coefficients in ascending order."""

    coefficients: Tuple[float, ...]
    _derivatives: Tuple[Polynomial, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        coefficients = tuple(float(c) for c in self.coefficients)
        if not coefficients:
            raise LabConfigurationError("a dispersion relation needs coefficients")
        if not all(math.isfinite(c) for c in coefficients):
            raise LabConfigurationError("dispersion coefficients must be finite")
        while len(coefficients) > 1 and coefficients[-1] == 0.0:
            coefficients = coefficients[:-1]
        if len(coefficients) - 1 > MAX_DEGREE:
            raise LabConfigurationError(
                f"dispersion relations are limited to degree {MAX_DEGREE}"
            )
        base = Polynomial(coefficients)
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(
            self,
            "_derivatives",
            tuple(base.deriv(k) for k in range(MAX_ORDER + 2)),
        )

    @classmethod
    def monomial(cls, degree: int, scale: float = 1.0, shift: float = 0.0):
        coefficients = [0.0] * (degree + 1)
        coefficients[degree] = scale
        coefficients[0] += shift
        return cls(tuple(coefficients))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def derivative(self, xi, order: int = 0):
        """Exact derivative of the given order, evaluated elementwise."""
        if order < 0 or order > MAX_ORDER + 1:
            raise LabConfigurationError(
                f"derivative order must be within 0..{MAX_ORDER + 1}"
            )
        return self._derivatives[order](xi)

    def __call__(self, xi):
        return self._derivatives[0](xi)

    def shifted(self, constant: float) -> "DispersionRelation":
        coefficients = list(self.coefficients)
        coefficients[0] += constant
        return DispersionRelation(tuple(coefficients))

    def max_speed(self, lo: float, hi: float, points: int = 257) -> float:
        """Largest |group velocity| on [lo, hi]."""
        samples = np.linspace(lo, hi, points)
        return float(np.max(np.abs(self.derivative(samples, 1))))

    def describe(self) -> str:
        terms = [
            f"{c:g}*z^{k}" if k else f"{c:g}"
            for k, c in enumerate(self.coefficients)
            if c != 0.0
        ]
        return " + ".join(terms) or "0"


@dataclass(frozen=True)
class DispersionTriple:
    """Dispersion relations of the output wave (a) and the two inputs (b, c)."""

    a: DispersionRelation
    b: DispersionRelation
    c: DispersionRelation
    name: str = "custom"

    def hypothesis_h(self, box: Box, floor: float = 1e-6) -> bool:
        """Second derivatives stay away from zero where the box probes them."""
        points = 257
        xi = np.linspace(box.xi_min, box.xi_max, points)
        eta = np.linspace(box.eta_min, box.eta_max, points)
        total = np.linspace(*box.sum_range(), points)
        lowest = min(
            float(np.min(np.abs(self.a.derivative(total, 2)))),
            float(np.min(np.abs(self.b.derivative(xi, 2)))),
            float(np.min(np.abs(self.c.derivative(eta, 2)))),
        )
        return lowest >= floor

    def phi(self, xi, eta, order: Tuple[int, int] = (0, 0)):
        return eval_phase(self, "phi", (xi, eta), order)

    def big_phi(self, xi, eta, order: Tuple[int, int] = (0, 0)):
        return eval_phase(self, "Phi", (xi, eta), order)

    def max_speed(self, box: Box) -> float:
        """Largest group velocity of a, b, c over the frequencies the box feeds them."""
        return max(
            self.b.max_speed(box.xi_min, box.xi_max),
            self.c.max_speed(box.eta_min, box.eta_max),
            self.a.max_speed(*box.sum_range()),
        )


def preset_triple(name: str, kappa: float = 1.0) -> DispersionTriple:
    """Named triples used throughout the scenario suite."""
    square = DispersionRelation((0.0, 0.0, 1.0))
    if name == "schrodinger":
        return DispersionTriple(square, square, square, name)
    if name == "schrodinger_shifted":
        return DispersionTriple(square, square.shifted(kappa), square, name)
    if name == "gap":
        shifted = square.shifted(5.0)
        return DispersionTriple(square, shifted, shifted, name)
    if name == "definite":
        return DispersionTriple(
            DispersionRelation((0.0, 0.0, 0.25)), square, square, name
        )
    if name == "tilted":
        return DispersionTriple(
            DispersionRelation((0.0, 1.0, 1.0)), square, square, name
        )
    raise LabConfigurationError(
        f"unknown preset {name!r}; choose one of {', '.join(PRESET_NAMES)}"
    )


def eval_phase(
    triple: DispersionTriple,
    which: PhaseName,
    point: Tuple,
    derivative: Tuple[int, int] = (0, 0),
    sigma=None,
    X: float = 0.0,
    sigma_order: int = 0,
):
    """Exact value or partial derivative of phi, Phi or psi.

    `derivative` is the (xi, eta) multi-index. For psi,
    psi(xi, eta, sigma) = (1 - sigma) a(xi) + sigma b(xi - eta) + sigma c(eta) + X xi,
    and `sigma_order` (0 or 1) differentiates in sigma as well.
    """
    i, j = (int(k) for k in derivative)
    if i < 0 or j < 0 or sigma_order not in (0, 1):
        raise LabConfigurationError("derivative orders must be non-negative")
    if i + j + sigma_order > MAX_ORDER:
        raise LabConfigurationError(
            f"derivatives are available up to total order {MAX_ORDER}"
        )
    xi, eta = point
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)

    if which == "phi":
        if sigma_order:
            raise LabConfigurationError("phi does not depend on sigma")
        value = -triple.a.derivative(xi + eta, i + j)
        if j == 0:
            value = value + triple.b.derivative(xi, i)
        if i == 0:
            value = value + triple.c.derivative(eta, j)
        return _as_output(value)

    if which == "Phi":
        if sigma_order:
            raise LabConfigurationError("Phi does not depend on sigma")
        return _as_output(_big_phi(triple, xi, eta, i, j))

    if which == "psi":
        if sigma is None:
            raise LabConfigurationError("psi needs sigma")
        resonance = _big_phi(triple, xi, eta, i, j)
        if sigma_order:
            return _as_output(resonance)
        value = np.asarray(sigma, dtype=float) * resonance
        if j == 0:
            value = value + triple.a.derivative(xi, i)
            if i == 0:
                value = value + X * xi
            elif i == 1:
                value = value + X
        return _as_output(value)

    raise LabConfigurationError(f"unknown phase {which!r}")


def _big_phi(triple: DispersionTriple, xi, eta, i: int, j: int):
    value = (-1.0) ** j * triple.b.derivative(xi - eta, i + j)
    if j == 0:
        value = value - triple.a.derivative(xi, i)
    if i == 0:
        value = value + triple.c.derivative(eta, j)
    return value


def _as_output(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


def phase_gradient(triple: DispersionTriple, xi, eta) -> Tuple:
    return triple.phi(xi, eta, (1, 0)), triple.phi(xi, eta, (0, 1))


def space_resonance_field(triple: DispersionTriple, xi, eta):
    """(d_xi - d_eta) phi, whose zero set is the space resonance set in input coordinates."""
    return triple.phi(xi, eta, (1, 0)) - triple.phi(xi, eta, (0, 1))


def field_extrema(
    field_fn: FieldFunction, box: Box, points: int = 257
) -> Tuple[float, float]:
    """(min |field|, max |field|) sampled on the box, corners included."""
    xi, eta = box.sample(points)
    magnitude = np.abs(field_fn(xi, eta))
    return float(magnitude.min()), float(magnitude.max())


def gamma_curvature(triple: DispersionTriple, xi, eta):
    """Curvature of the level set of phi through (xi, eta), from exact derivatives."""
    fx = triple.phi(xi, eta, (1, 0))
    fy = triple.phi(xi, eta, (0, 1))
    fxx = triple.phi(xi, eta, (2, 0))
    fxy = triple.phi(xi, eta, (1, 1))
    fyy = triple.phi(xi, eta, (0, 2))
    numerator = np.abs(fy * fy * fxx - 2.0 * fx * fy * fxy + fx * fx * fyy)
    gradient = np.hypot(fx, fy)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(gradient > 0, numerator / gradient**3, np.inf)


@dataclass(frozen=True)
class ResonantPoint:
    """Space-time resonant point in output coordinates, Phi = Phi_eta = 0."""

    xi0: float
    eta0: float
    phi_xi: float
    phi_etaeta: float
    transversal: bool
    refined: bool = True
    residual: float = 0.0

    @property
    def input_coordinates(self) -> Tuple[float, float]:
        return self.xi0 - self.eta0, self.eta0


@dataclass(frozen=True)
class CharacteristicPoint:
    xi: float
    eta: float
    direction: Direction


@dataclass(frozen=True)
class GammaClass:
    """Rate-table category of the time resonance set inside a symbol support."""

    tag: GammaTag
    details: str = ""
    characteristic_points: Tuple[CharacteristicPoint, ...] = ()
    min_curvature: Optional[float] = None


@dataclass(frozen=True, eq=False)
class ResonanceGeometry:
    """Traced resonance sets; polylines are (k, 2) arrays of input coordinates."""

    box: Box
    resolution: int
    gamma: Tuple[np.ndarray, ...]
    delta: Tuple[np.ndarray, ...]
    points: Tuple[ResonantPoint, ...] = ()
    classification: Optional[GammaClass] = None

    @property
    def characteristic_points(self) -> Tuple[CharacteristicPoint, ...]:
        if self.classification is None:
            return ()
        return self.classification.characteristic_points

    @property
    def cell_diagonal(self) -> float:
        return self.box.diagonal / self.resolution

    def output_coordinates(self, polylines: Sequence[np.ndarray]) -> List[np.ndarray]:
        """Map input-coordinate polylines to output coordinates, (xi + eta, eta)."""
        return [
            np.column_stack((line[:, 0] + line[:, 1], line[:, 1]))
            for line in polylines
        ]

    def gamma_vertices(self) -> np.ndarray:
        if not self.gamma:
            return np.empty((0, 2))
        return np.vstack(self.gamma)


def _polish(
    field_fn: FieldFunction,
    fixed: float,
    lo: float,
    hi: float,
    along_eta: bool,
    guess: float,
) -> float:
    def restricted(value: float) -> float:
        if along_eta:
            return float(field_fn(np.float64(fixed), np.float64(value)))
        return float(field_fn(np.float64(value), np.float64(fixed)))

    f_lo, f_hi = restricted(lo), restricted(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0:
        return guess
    return float(brentq(restricted, lo, hi, xtol=1e-15, maxiter=200))


def _trace_field(
    field_fn: FieldFunction, box: Box, resolution: int, tolerance: float
) -> Tuple[np.ndarray, ...]:
    h_xi = (box.xi_max - box.xi_min) / resolution
    h_eta = (box.eta_max - box.eta_min) / resolution
    xi_nodes = box.xi_min + h_xi * (np.arange(resolution) + 0.5)
    eta_nodes = box.eta_min + h_eta * (np.arange(resolution) + 0.5)
    values = np.asarray(
        field_fn(xi_nodes[:, None], eta_nodes[None, :]), dtype=float
    )
    if float(np.max(np.abs(values))) <= DEGENERATE_FIELD:
        raise DegenerateGeometryError(
            "traced field vanishes identically on "
            f"[{box.xi_min:g}, {box.xi_max:g}] x [{box.eta_min:g}, {box.eta_max:g}]"
        )
    values = np.where(values == 0.0, np.finfo(float).tiny, values)

    polylines = []
    unpolished = 0
    last = resolution - 1
    for contour in find_contours(values, 0.0):
        vertices = np.empty_like(contour)
        for k, (row, col) in enumerate(contour):
            xi = box.xi_min + h_xi * (row + 0.5)
            eta = box.eta_min + h_eta * (col + 0.5)
            if abs(row - round(row)) < 1e-9:
                j0 = min(int(math.floor(col)), last - 1)
                eta = _polish(
                    field_fn,
                    xi_nodes[int(round(row))],
                    eta_nodes[j0],
                    eta_nodes[j0 + 1],
                    True,
                    eta,
                )
                xi = float(xi_nodes[int(round(row))])
            else:
                i0 = min(int(math.floor(row)), last - 1)
                xi = _polish(
                    field_fn,
                    eta_nodes[int(round(col))],
                    xi_nodes[i0],
                    xi_nodes[i0 + 1],
                    False,
                    xi,
                )
                eta = float(eta_nodes[int(round(col))])
            if abs(float(field_fn(np.float64(xi), np.float64(eta)))) > tolerance:
                unpolished += 1
            vertices[k] = (xi, eta)
        polylines.append(vertices)
    if unpolished:
        log_debug(f"{unpolished} traced vertices kept at linear interpolation")
    return tuple(polylines)


def trace_resonance_sets(
    triple: DispersionTriple,
    box: Box,
    resolution: int = 256,
    settings: LabSettings = DEFAULT_SETTINGS,
) -> ResonanceGeometry:
    """Trace the time (phi = 0) and space ((d_xi - d_eta) phi = 0) resonance sets."""
    if resolution < 64:
        raise LabConfigurationError("trace resolution must be at least 64")

    def gamma_field(xi, eta):
        return triple.phi(xi, eta)

    def delta_field(xi, eta):
        return space_resonance_field(triple, xi, eta)

    tolerance = settings.trace_tolerance
    gamma = _trace_field(gamma_field, box, resolution, tolerance)
    delta = _trace_field(delta_field, box, resolution, tolerance)
    log_debug(
        f"traced {triple.name}: {len(gamma)} gamma and {len(delta)} delta polylines"
    )
    return ResonanceGeometry(box, resolution, gamma, delta)


def _intersection_seeds(
    geom: ResonanceGeometry, triple: DispersionTriple
) -> List[Tuple[float, float]]:
    diagonal = geom.cell_diagonal
    seeds: List[Tuple[float, float]] = []
    for line in geom.delta:
        xi, eta = line[:, 0], line[:, 1]
        values = np.asarray(triple.phi(xi, eta), dtype=float)
        for k in range(len(values) - 1):
            if values[k] == 0.0 or values[k] * values[k + 1] < 0:
                weight = values[k] / (values[k] - values[k + 1]) if values[k] else 0.0
                seeds.append(
                    (
                        float(xi[k] + weight * (xi[k + 1] - xi[k])),
                        float(eta[k] + weight * (eta[k + 1] - eta[k])),
                    )
                )
        magnitude = np.abs(values)
        for k in range(1, len(values) - 1):
            if magnitude[k] <= magnitude[k - 1] and magnitude[k] <= magnitude[k + 1]:
                fx, fy = phase_gradient(triple, xi[k], eta[k])
                threshold = diagonal * max(1.0, math.hypot(fx, fy)) + diagonal**2
                if magnitude[k] <= threshold:
                    seeds.append((float(xi[k]), float(eta[k])))
    return seeds


def _newton_point(
    triple: DispersionTriple, xi: float, eta: float, tolerance: float
) -> Tuple[float, float, float, bool]:
    """Newton on (Phi, Phi_eta) in output coordinates."""
    residual = math.inf
    for _ in range(NEWTON_ITERATIONS):
        value = triple.big_phi(xi, eta)
        slope = triple.big_phi(xi, eta, (0, 1))
        jacobian = np.array(
            [
                [triple.big_phi(xi, eta, (1, 0)), slope],
                [triple.big_phi(xi, eta, (1, 1)), triple.big_phi(xi, eta, (0, 2))],
            ]
        )
        step = np.linalg.lstsq(jacobian, -np.array([value, slope]), rcond=None)[0]
        xi += float(step[0])
        eta += float(step[1])
        residual = max(
            abs(triple.big_phi(xi, eta)), abs(triple.big_phi(xi, eta, (0, 1)))
        )
        if residual <= tolerance and float(np.hypot(*step)) < NEWTON_STEP_TOLERANCE:
            return xi, eta, residual, True
    return xi, eta, residual, residual <= tolerance


def find_spacetime_points(
    geom: ResonanceGeometry,
    triple: DispersionTriple,
    settings: LabSettings = DEFAULT_SETTINGS,
) -> List[ResonantPoint]:
    """Refine intersections of the traced sets into space-time resonant points."""
    diagonal = geom.cell_diagonal
    search_box = geom.box.expanded(diagonal)
    points: List[ResonantPoint] = []
    for seed_xi, seed_eta in _intersection_seeds(geom, triple):
        xi0, eta0, residual, refined = _newton_point(
            triple, seed_xi + seed_eta, seed_eta, settings.trace_tolerance
        )
        if not refined:
            # keep the seed, not wherever Newton wandered off to
            xi0, eta0 = seed_xi + seed_eta, seed_eta
        if not bool(search_box.contains(xi0 - eta0, eta0)):
            continue
        if any(
            math.hypot(xi0 - p.xi0, eta0 - p.eta0) <= diagonal for p in points
        ):
            continue

        derivatives = [
            abs(triple.big_phi(xi0, eta0, order))
            for order in ((1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
        ]
        floor = settings.transversality_floor * max(1.0, max(derivatives))
        phi_xi = triple.big_phi(xi0, eta0, (1, 0))
        phi_etaeta = triple.big_phi(xi0, eta0, (0, 2))
        transversal = refined and abs(phi_xi) > floor and abs(phi_etaeta) > floor
        if not refined:
            log_warning(
                f"resonant candidate near ({xi0:.6g}, {eta0:.6g}) did not converge; "
                f"residual {residual:.2e}"
            )
        points.append(
            ResonantPoint(
                float(xi0),
                float(eta0),
                float(phi_xi),
                float(phi_etaeta),
                bool(transversal),
                bool(refined),
                float(residual),
            )
        )
    points.sort(key=lambda p: (p.xi0, p.eta0))
    log_debug(f"found {len(points)} space-time resonant points")
    return points


def _definite_critical_zero(
    triple: DispersionTriple, support: Box, tolerance: float, floor: float
) -> Optional[Tuple[float, float, np.ndarray]]:
    """Zero of phi with vanishing gradient and definite Hessian inside the support."""
    seeds = [support.center] + [
        (x, y)
        for x in (support.xi_min, support.xi_max)
        for y in (support.eta_min, support.eta_max)
    ]
    for xi, eta in seeds:
        for _ in range(NEWTON_ITERATIONS):
            gradient = np.array(phase_gradient(triple, xi, eta))
            hessian = np.array(
                [
                    [triple.phi(xi, eta, (2, 0)), triple.phi(xi, eta, (1, 1))],
                    [triple.phi(xi, eta, (1, 1)), triple.phi(xi, eta, (0, 2))],
                ]
            )
            step = np.linalg.lstsq(hessian, -gradient, rcond=None)[0]
            xi += float(step[0])
            eta += float(step[1])
            if float(np.hypot(*step)) < NEWTON_STEP_TOLERANCE:
                break
        if not bool(support.contains(xi, eta)):
            continue
        if abs(triple.phi(xi, eta)) > tolerance:
            continue
        if float(np.hypot(*phase_gradient(triple, xi, eta))) > tolerance:
            continue
        eigenvalues = np.linalg.eigvalsh(
            np.array(
                [
                    [triple.phi(xi, eta, (2, 0)), triple.phi(xi, eta, (1, 1))],
                    [triple.phi(xi, eta, (1, 1)), triple.phi(xi, eta, (0, 2))],
                ]
            )
        )
        if np.all(np.abs(eigenvalues) > floor) and (
            np.all(eigenvalues > 0) or np.all(eigenvalues < 0)
        ):
            return xi, eta, eigenvalues
    return None


def _characteristic_points(
    triple: DispersionTriple, lines: Sequence[np.ndarray], floor: float
) -> List[CharacteristicPoint]:
    found: List[CharacteristicPoint] = []
    fields: Dict[str, FieldFunction] = {
        "xi": lambda x, y: triple.phi(x, y, (1, 0)),
        "eta": lambda x, y: triple.phi(x, y, (0, 1)),
        "xi+eta": lambda x, y: space_resonance_field(triple, x, y),
    }
    for line in lines:
        xi, eta = line[:, 0], line[:, 1]
        fx, fy = phase_gradient(triple, xi, eta)
        scale = np.hypot(fx, fy)
        for direction, field_fn in fields.items():
            values = np.asarray(field_fn(xi, eta), dtype=float)
            for k in range(len(values)):
                crossing = k + 1 < len(values) and values[k] * values[k + 1] < 0
                vanishing = abs(values[k]) <= floor * max(1.0, float(scale[k]))
                if crossing or vanishing:
                    point = CharacteristicPoint(
                        float(xi[k]), float(eta[k]), direction  # type: ignore[arg-type]
                    )
                    if not any(
                        p.direction == direction
                        and math.hypot(p.xi - point.xi, p.eta - point.eta) < 1e-3
                        for p in found
                    ):
                        found.append(point)
    return found


def _clip_polylines(lines: Sequence[np.ndarray], support: Box) -> List[np.ndarray]:
    """Split polylines into the runs of vertices that lie inside the support."""
    pieces: List[np.ndarray] = []
    for line in lines:
        inside = support.contains(line[:, 0], line[:, 1])
        start = None
        for k, flag in enumerate(list(inside) + [False]):
            if flag and start is None:
                start = k
            elif not flag and start is not None:
                pieces.append(line[start:k])
                start = None
    return pieces


def classify(
    geom: ResonanceGeometry,
    triple: DispersionTriple,
    symbol_support: Box,
    settings: LabSettings = DEFAULT_SETTINGS,
) -> GammaClass:
    """Rate-table category of the time resonance set inside the symbol support."""
    floor = settings.transversality_floor
    curves = _clip_polylines(geom.gamma, symbol_support)

    if not curves:
        critical = _definite_critical_zero(
            triple, symbol_support, settings.trace_tolerance, floor
        )
        if critical is not None:
            xi, eta, eigenvalues = critical
            return GammaClass(
                "point_order2_definite",
                f"order-two zero at ({xi:.6g}, {eta:.6g}), Hessian eigenvalues "
                f"{eigenvalues[0]:.6g}, {eigenvalues[1]:.6g}",
            )
        return GammaClass("empty", "phi does not vanish on the support")

    inside = [
        p
        for p in geom.points
        if bool(symbol_support.contains(*p.input_coordinates))
    ]
    transversal = [p for p in inside if p.transversal]
    if transversal and len(transversal) < len(inside):
        return GammaClass(
            "mixed",
            f"{len(transversal)} transversal and "
            f"{len(inside) - len(transversal)} degenerate space-time resonant points",
        )
    characteristic = tuple(_characteristic_points(triple, curves, floor))
    vertices = np.vstack(curves)
    curvature = gamma_curvature(triple, vertices[:, 0], vertices[:, 1])
    min_curvature = float(np.min(curvature))

    if transversal:
        return GammaClass(
            "transversal_point_intersection",
            f"{len(transversal)} transversal space-time resonant point(s)",
            characteristic,
            min_curvature,
        )
    if all(p.direction == "xi+eta" for p in characteristic):
        return GammaClass(
            "curve_noncharacteristic",
            "no characteristic direction along the curve",
            characteristic,
            min_curvature,
        )
    if min_curvature >= settings.curvature_floor:
        return GammaClass(
            "curve_nonvanishing_curvature",
            f"minimum curvature {min_curvature:.4g}",
            characteristic,
            min_curvature,
        )
    return GammaClass(
        "curve_general",
        f"characteristic curve with minimum curvature {min_curvature:.4g}",
        characteristic,
        min_curvature,
    )


def analyze_geometry(
    triple: DispersionTriple,
    box: Box,
    symbol_support: Optional[Box] = None,
    resolution: int = 256,
    settings: LabSettings = DEFAULT_SETTINGS,
) -> ResonanceGeometry:
    """Trace, refine and classify in one call."""
    geom = trace_resonance_sets(triple, box, resolution, settings)
    geom = replace(geom, points=tuple(find_spacetime_points(geom, triple, settings)))
    support = symbol_support or box
    return replace(geom, classification=classify(geom, triple, support, settings))
