import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from resonancelab.dispersion_geometry import preset_triple
from resonancelab.duhamel import (
    PRESET_SUPPORTS,
    build_scenario,
    choose_grid,
    dispersion_onset,
    duhamel_symbol,
    evolve,
    evolve_quadrature,
    evolve_series,
    fit_edge_envelopes,
    minimum_steps,
    predict_no_time_resonance,
    predict_profile,
    predict_truncated_duhamel,
    preset_scenario,
    relative_l2_distance,
    resonant_point,
    sample_profile,
    sigma_of_X,
    truncation_residual,
)
from resonancelab.errors import (
    HypothesisError,
    LabConfigurationError,
    WrapAroundError,
)
from resonancelab.oscillatory import fresnel_g2
from resonancelab.rate_lab import lower_bound_probe
from resonancelab.spectral_core import (
    BilinearSymbol,
    Box,
    Grid,
    NormSpec,
    SampledState,
    make_witness,
)

ROOT2 = math.sqrt(2.0)
SQRT_HALF = math.sqrt(0.5)


class TestDuhamelSymbol:
    def test_vanishes_at_zero_time(self):
        symbol = duhamel_symbol(
            preset_triple("schrodinger"), BilinearSymbol.radial_bump((0.5, 0.0), 0.3), 0.0
        )
        xi = np.linspace(0.3, 0.7, 5)
        assert not np.any(symbol(xi, np.zeros(5)))

    def test_grows_linearly_on_time_resonance(self):
        m = BilinearSymbol.radial_bump((0.5, 0.0), 0.3)
        symbol = duhamel_symbol(preset_triple("schrodinger"), m, 40.0)
        assert abs(complex(symbol(0.5, 0.0))) == pytest.approx(40.0)

    def test_negative_time(self):
        with pytest.raises(LabConfigurationError):
            duhamel_symbol(preset_triple("gap"), BilinearSymbol.radial_bump((0, 0), 1.0), -1.0)


class TestGrid:
    def test_choose_grid_holds_the_horizon(self):
        triple = preset_triple("gap")
        box = Box.around((0.5, 0.5), 0.5)
        grid = choose_grid(triple, box, 4.0, 100.0)
        assert grid.length >= 2 * triple.max_speed(box) * 100.0 + 40.0
        assert grid.max_frequency > 1.25 * 2.0

    def test_scenario_fields(self, gap_scenario):
        assert gap_scenario.classification_tag == "empty"
        assert gap_scenario.t_budget >= 100.0
        low, high = gap_scenario.phase_bounds
        assert 8.0 - 1e-9 <= low <= high <= 10.0 + 1e-9


class TestEvolve:
    def test_zero_time(self, gap_scenario):
        assert not np.any(evolve(gap_scenario, 0.0).coefficients)

    def test_zero_data_gives_zero(self, gap_scenario):
        zero = SampledState(gap_scenario.grid, np.zeros(gap_scenario.grid.n_points))
        sc = build_scenario(
            gap_scenario.triple, gap_scenario.symbol, zero, gap_scenario.g, "zero", 10.0
        )
        assert not np.any(evolve(sc, 10.0).coefficients)

    @pytest.mark.parametrize("t", [1.0, 10.0, 100.0])
    def test_identity_without_time_resonance(self, gap_scenario, t):
        exact, asymptotic = predict_no_time_resonance(gap_scenario, t)
        assert relative_l2_distance(exact, evolve(gap_scenario, t)) <= 1e-8
        assert asymptotic.l2_norm() > 0

    def test_quadrature_agrees(self, gap_scenario):
        t = 5.0
        steps = 8 * minimum_steps(gap_scenario, t)
        quadrature = evolve_quadrature(gap_scenario, t, steps)
        assert relative_l2_distance(quadrature, evolve(gap_scenario, t)) <= 1e-4

    @pytest.mark.slow
    def test_quadrature_agrees_at_long_time(self, gap_scenario):
        t = 50.0
        steps = 8 * minimum_steps(gap_scenario, t)
        quadrature = evolve_quadrature(gap_scenario, t, steps)
        assert relative_l2_distance(quadrature, evolve(gap_scenario, t)) <= 1e-4

    @pytest.mark.slow
    @pytest.mark.parametrize("name", sorted(PRESET_SUPPORTS))
    def test_quadrature_error_is_fourth_order(self, name):
        sc = preset_scenario(name, t_max=10.0)
        t = 10.0
        exact = evolve(sc, t)
        base = 4 * minimum_steps(sc, t)
        coarse = relative_l2_distance(evolve_quadrature(sc, t, base), exact)
        fine = relative_l2_distance(evolve_quadrature(sc, t, 2 * base), exact)
        assert fine <= 1e-4
        assert coarse / fine >= 8.0

    def test_under_resolved_quadrature(self, gap_scenario):
        required = minimum_steps(gap_scenario, 5.0)
        with pytest.raises(LabConfigurationError, match="under-resolves"):
            evolve_quadrature(gap_scenario, 5.0, 2)
        with pytest.raises(LabConfigurationError):
            evolve_quadrature(gap_scenario, 5.0, required + 1)

    def test_wrap_around(self, gap_scenario):
        with pytest.raises(WrapAroundError) as info:
            evolve(gap_scenario, 1e6)
        assert info.value.required_length > gap_scenario.grid.length

    def test_negative_time(self, gap_scenario):
        with pytest.raises(LabConfigurationError):
            evolve(gap_scenario, -1.0)

    def test_series_tabulates_norms(self, gap_scenario):
        spec = NormSpec.lebesgue(2)
        result = evolve_series(gap_scenario, [0.0, 1.0, 2.0], [spec])
        values = result.norm_table[spec]
        assert values[0] == 0.0
        assert np.all(values[1:] > 0)
        assert len(result.spectra) == 3

    def test_series_method(self, gap_scenario):
        with pytest.raises(LabConfigurationError):
            evolve_series(gap_scenario, [1.0], method="leapfrog")


class TestPredictors:
    def test_no_time_resonance_needs_empty_gamma(self):
        sc = preset_scenario("schrodinger", t_max=10.0)
        with pytest.raises(HypothesisError):
            predict_no_time_resonance(sc, 1.0)

    def test_truncation_at_zero_predicts_nothing(self, gap_off_diagonal):
        prediction = predict_truncated_duhamel(gap_off_diagonal, 40.0, 0.0)
        assert not np.any(prediction.coefficients)

    def test_truncation_at_t_is_exact(self, gap_off_diagonal):
        assert truncation_residual(gap_off_diagonal, 30.0, 30.0) == 0.0

    def test_late_truncation_captures_the_profile(self, gap_off_diagonal):
        early = truncation_residual(gap_off_diagonal, 40.0, 0.0)
        late = truncation_residual(gap_off_diagonal, 40.0, 20.0)
        assert late <= 0.1 * early

    def test_truncation_rejects_space_resonance(self, gap_scenario):
        with pytest.raises(HypothesisError):
            predict_truncated_duhamel(gap_scenario, 10.0, 5.0)

    def test_truncation_window(self, gap_off_diagonal):
        with pytest.raises(LabConfigurationError):
            predict_truncated_duhamel(gap_off_diagonal, 10.0, 20.0)


class TestProfile:
    def test_resonant_point(self, shifted_scenario):
        point = resonant_point(shifted_scenario)
        assert point.input_coordinates == pytest.approx((SQRT_HALF, SQRT_HALF), abs=1e-4)

    def test_sigma_is_affine_in_X(self, shifted_scenario):
        point = resonant_point(shifted_scenario)
        X = np.array([-3.0, 0.0, 1.5])
        assert_allclose(sigma_of_X(shifted_scenario, point, X), 2.0 + X / ROOT2, atol=1e-6)

    def test_regions(self, shifted_scenario):
        X = [-4.0, -2 * ROOT2, -2.3, -ROOT2, 0.0]
        prediction = predict_profile(shifted_scenario, 10.0, X)
        assert list(prediction.region) == [
            "before_resonance",
            "edge_zero",
            "interior",
            "edge_one",
            "beyond_resonance",
        ]
        assert prediction.amplitude[0] == 0 and prediction.amplitude[4] == 0
        assert prediction.error_order[2] == -1.0
        assert prediction.mask("interior").sum() == 1

    def test_edge_zero_shape(self, shifted_scenario):
        prediction = predict_profile(shifted_scenario, 16.0, [-2 * ROOT2], (2.0, 1.0))
        expected = 2.0 * fresnel_g2(4.0 * float(prediction.sigma[0])) / 2.0
        assert prediction.amplitude[0] == pytest.approx(expected, abs=1e-6)

    def test_profile_needs_transversal_point(self, gap_scenario):
        with pytest.raises(HypothesisError):
            predict_profile(gap_scenario, 10.0, [0.0])

    def test_profile_needs_positive_time(self, shifted_scenario):
        with pytest.raises(LabConfigurationError):
            predict_profile(shifted_scenario, 0.0, [0.0])

    def test_lower_bound_needs_data_at_the_point(self):
        grid = Grid(1024, 256.0)
        center = (SQRT_HALF, SQRT_HALF)
        f = make_witness("band_bump", 0.0, SQRT_HALF, 0.2, grid)
        g = make_witness("band_bump", 0.0, SQRT_HALF + 0.4, 0.2, grid)
        sc = build_scenario(
            preset_triple("schrodinger_shifted"),
            BilinearSymbol.radial_bump(center, 0.25),
            f,
            g,
            "vanishing data",
            10.0,
        )
        with pytest.raises(HypothesisError, match="resonant frequencies"):
            lower_bound_probe(sc, 2.0, np.linspace(1.0, 10.0, 10))

    def test_dispersion_onset_shrinks_with_the_band(self, shifted_scenario):
        narrow = dispersion_onset(shifted_scenario)
        wide = dispersion_onset(
            preset_scenario("schrodinger_shifted", t_max=20.0, width=1.0, radius=1.0)
        )
        assert narrow > 20.0
        assert wide < 5.0
        # both weights have the same shape up to a fourfold rescaling in eta
        assert narrow / wide == pytest.approx(16.0, rel=0.15)

    def test_dispersion_onset_needs_transversal_point(self, gap_scenario):
        with pytest.raises(HypothesisError):
            dispersion_onset(gap_scenario)


def _interior(sc, t):
    X, modulus = sample_profile(sc, t)
    sigma = sigma_of_X(sc, resonant_point(sc), X)
    keep = (sigma > 0.1) & (sigma < 0.9)
    return X[keep], modulus[keep], sigma[keep]


@pytest.mark.slow
class TestProfileAgainstEvolution:
    def test_interior_matches_the_stationary_amplitude(self, shifted_long):
        X, modulus, _ = _interior(shifted_long, 400.0)
        prediction = predict_profile(shifted_long, 400.0, X)
        assert np.all(prediction.mask("interior"))
        ratio = modulus / prediction.modulus
        assert float(np.median(ratio)) == pytest.approx(1.0, abs=0.05)

    def test_interior_decays_like_inverse_root_time(self, shifted_long):
        levels = []
        for t in (100.0, 400.0, 1000.0):
            _, modulus, sigma = _interior(shifted_long, t)
            levels.append(float(np.max(modulus * np.sqrt(t * sigma))))
        assert max(levels) <= 1.2 * min(levels)

    @pytest.mark.parametrize(
        "fixture, region",
        [("wideband_shifted", "edge_zero"), ("shifted_long", "edge_one")],
    )
    def test_edge_envelope_carries_to_later_times(self, request, fixture, region):
        sc = request.getfixturevalue(fixture)
        envelopes = fit_edge_envelopes(sc, 200.0)
        X, modulus = sample_profile(sc, 800.0)
        prediction = predict_profile(sc, 800.0, X, envelopes)
        mask = prediction.mask(region)
        measured = float(np.max(modulus[mask]))
        predicted = float(np.max(prediction.modulus[mask]))
        assert measured == pytest.approx(predicted, rel=0.25)

    def test_l2_norm_grows_logarithmically(self, shifted_long):
        verdict = lower_bound_probe(shifted_long, 2.0, np.geomspace(50.0, 1000.0, 12))
        assert verdict.measured.coefficient > 0
        assert verdict.measured.r_squared >= 0.95
        assert verdict.passed
