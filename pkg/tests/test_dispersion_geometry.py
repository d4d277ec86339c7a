import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from resonancelab.dispersion_geometry import (
    DispersionRelation,
    DispersionTriple,
    analyze_geometry,
    eval_phase,
    gamma_curvature,
    preset_triple,
    space_resonance_field,
    trace_resonance_sets,
)
from resonancelab.errors import DegenerateGeometryError, LabConfigurationError
from resonancelab.spectral_core import Box

ROOT2 = math.sqrt(2.0)


class TestDispersionRelation:
    def test_exact_derivatives(self):
        relation = DispersionRelation((1.0, 0.0, 3.0, 0.0, 2.0))
        assert relation(2.0) == 1 + 12 + 32
        assert relation.derivative(2.0, 1) == 12 + 64
        assert relation.derivative(2.0, 2) == 6 + 96
        assert relation.degree == 4

    def test_trailing_zeros_are_trimmed(self):
        assert DispersionRelation((0.0, 1.0, 0.0, 0.0)).degree == 1

    def test_degree_limit(self):
        with pytest.raises(LabConfigurationError):
            DispersionRelation((0.0,) * 5 + (1.0,))

    def test_shifted_and_monomial(self):
        square = DispersionRelation.monomial(2)
        assert square.coefficients == (0.0, 0.0, 1.0)
        assert square.shifted(5.0)(1.0) == 6.0
        assert square.describe() == "1*z^2"

    def test_max_speed(self):
        assert DispersionRelation.monomial(2).max_speed(-1.0, 3.0) == pytest.approx(6.0)


class TestEvalPhase:
    def test_schrodinger_phase_value(self):
        triple = preset_triple("schrodinger")
        assert eval_phase(triple, "phi", (1.0, 2.0)) == pytest.approx(-4.0)

    def test_big_phi_is_phi_in_output_coordinates(self):
        triple = preset_triple("tilted")
        xi, eta = np.linspace(-1, 1, 7), np.linspace(2, -0.5, 7)
        assert_allclose(triple.big_phi(xi + eta, eta), triple.phi(xi, eta), atol=1e-12)

    def test_shifted_derivatives(self):
        triple = preset_triple("schrodinger_shifted", kappa=1.0)
        xi0, eta0 = ROOT2, ROOT2 / 2
        assert triple.big_phi(xi0, eta0) == pytest.approx(0.0, abs=1e-12)
        assert triple.big_phi(xi0, eta0, (0, 1)) == pytest.approx(0.0, abs=1e-12)
        assert triple.big_phi(xi0, eta0, (1, 0)) == pytest.approx(-ROOT2)
        assert triple.big_phi(xi0, eta0, (0, 2)) == 4.0

    def test_psi_interpolates_between_a_and_big_phi(self):
        triple = preset_triple("schrodinger_shifted")
        point = (1.0, 0.3)
        at_zero = eval_phase(triple, "psi", point, sigma=0.0, X=0.5)
        assert at_zero == pytest.approx(triple.a(1.0) + 0.5)
        slope = eval_phase(triple, "psi", point, sigma=0.2, sigma_order=1)
        assert slope == pytest.approx(triple.big_phi(*point))

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"derivative": (3, 0)},
            {"derivative": (-1, 0)},
            {"derivative": (1, 1), "sigma_order": 1},
        ],
    )
    def test_order_limits(self, kwargs):
        triple = preset_triple("schrodinger")
        which = "psi" if "sigma_order" in kwargs else "phi"
        with pytest.raises(LabConfigurationError):
            eval_phase(triple, which, (0.0, 0.0), sigma=0.5, **kwargs)

    def test_psi_needs_sigma(self):
        with pytest.raises(LabConfigurationError):
            eval_phase(preset_triple("schrodinger"), "psi", (0.0, 0.0))

    def test_unknown_preset(self):
        with pytest.raises(LabConfigurationError, match="unknown preset"):
            preset_triple("kdv")


class TestTracing:
    def test_traced_vertices_lie_on_the_sets(self):
        triple = preset_triple("schrodinger_shifted")
        geom = trace_resonance_sets(triple, Box(-1.5, 1.5, -1.5, 1.5), 128)
        assert geom.gamma and geom.delta
        vertices = geom.gamma_vertices()
        assert np.max(np.abs(triple.phi(vertices[:, 0], vertices[:, 1]))) < 1e-8
        delta = np.vstack(geom.delta)
        assert np.max(np.abs(space_resonance_field(triple, delta[:, 0], delta[:, 1]))) < 1e-8

    def test_vanishing_field_is_degenerate(self):
        zero = DispersionRelation((0.0,))
        triple = DispersionTriple(zero, zero, zero)
        with pytest.raises(DegenerateGeometryError):
            trace_resonance_sets(triple, Box(-1, 1, -1, 1), 64)

    def test_minimum_resolution(self):
        with pytest.raises(LabConfigurationError):
            trace_resonance_sets(preset_triple("gap"), Box(-1, 1, -1, 1), 32)

    def test_output_coordinates(self):
        geom = trace_resonance_sets(preset_triple("schrodinger_shifted"), Box(0, 1.5, 0, 1.5), 64)
        mapped = geom.output_coordinates(geom.gamma)
        assert_allclose(mapped[0][:, 0], geom.gamma[0][:, 0] + geom.gamma[0][:, 1])


class TestSpacetimePoints:
    def test_shifted_triple_has_two_transversal_points(self):
        triple = preset_triple("schrodinger_shifted", kappa=1.0)
        geom = analyze_geometry(triple, Box(-1.5, 1.5, -1.5, 1.5))
        assert len(geom.points) == 2
        for point, sign in zip(geom.points, (-1.0, 1.0)):
            assert point.xi0 == pytest.approx(sign * ROOT2, abs=1e-4)
            assert point.eta0 == pytest.approx(sign * ROOT2 / 2, abs=1e-4)
            assert point.phi_xi == pytest.approx(-2 * point.eta0, abs=1e-9)
            assert point.phi_etaeta == 4.0
            assert point.transversal and point.refined
        assert geom.points[1].input_coordinates == pytest.approx((ROOT2 / 2, ROOT2 / 2), abs=1e-4)

    def test_gap_triple_has_none(self):
        geom = analyze_geometry(preset_triple("gap"), Box(-1, 1, -1, 1))
        assert geom.points == ()
        assert geom.gamma == ()

    def test_schrodinger_point_is_degenerate(self):
        geom = analyze_geometry(preset_triple("schrodinger"), Box(-1, 1, -1, 1))
        assert len(geom.points) == 1
        point = geom.points[0]
        assert abs(point.xi0) < 1e-3 and abs(point.eta0) < 1e-3
        assert abs(point.phi_xi) < 1e-3
        assert not point.transversal


class TestClassify:
    def test_gap_support_is_empty(self):
        geom = analyze_geometry(preset_triple("gap"), Box(-1, 1, -1, 1))
        assert geom.classification.tag == "empty"

    def test_definite_triple(self):
        support = Box.around((0.0, 0.0), 0.3)
        geom = analyze_geometry(preset_triple("definite"), support)
        assert geom.classification.tag == "point_order2_definite"
        assert "1, 2" in geom.classification.details

    def test_transversal_intersection(self):
        support = Box.around((ROOT2 / 2, ROOT2 / 2), 0.25)
        geom = analyze_geometry(
            preset_triple("schrodinger_shifted"), support.expanded(0.05), support
        )
        assert geom.classification.tag == "transversal_point_intersection"

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 1.5])
    def test_shifted_family_keeps_its_class(self, kappa):
        center = math.sqrt(kappa / 2)
        support = Box.around((center, center), 0.2)
        geom = analyze_geometry(
            preset_triple("schrodinger_shifted", kappa), support.expanded(0.05), support
        )
        assert geom.classification.tag == "transversal_point_intersection"

    def test_hyperbola_away_from_delta_is_curved(self):
        # xi * eta = 1/2 near (1, 1/2): no characteristic direction, curvature bounded below
        support = Box.around((1.0, 0.5), 0.15)
        geom = analyze_geometry(
            preset_triple("schrodinger_shifted"), support.expanded(0.05), support
        )
        assert geom.classification.tag in (
            "curve_noncharacteristic",
            "curve_nonvanishing_curvature",
        )
        assert geom.classification.min_curvature > 0.1

    def test_straight_gamma_has_zero_curvature(self):
        triple = preset_triple("schrodinger")
        xi = np.array([0.3, 0.5])
        assert_allclose(gamma_curvature(triple, xi, np.zeros(2)), 0.0, atol=1e-12)
