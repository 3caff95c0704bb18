import math

import numpy as np
import pytest

from app.errors import ParameterRangeError, ResolutionError
from app.geometry import (CantorGraphOracle, GasketRecipe, HalfSquareRecipe, SegmentRecipe, SsNestOracle,
                          StringOracle, cantor_graph_tube_volume, distance_to_set, pixel_tube_volume,
                          primitive_tube, scaling_words, segment_oracle, spray_tube_volume, string_tube_volume,
                          tube_oracle)
from app.models import FractalString, OscillatoryPeriod, SelfSimilarSpray

SQRT3 = math.sqrt(3)


class TestExactOracles:
    """Closed-form tube volumes"""

    def test_segment(self):
        oracle = segment_oracle(2.0)
        assert oracle(0.25) == pytest.approx(1.5, abs=1e-15), "V(t) = 2t + 1 for the unit interval"
        assert oracle(5.0) == pytest.approx(5.0), "V saturates at t = delta"
        assert oracle.omega_volume == pytest.approx(5.0)

    def test_cantor_string_value(self):
        oracle = StringOracle(FractalString.cantor())
        # gaps 1/3 and 1/9 exceed 2t = 0.1, the rest are swallowed whole
        assert oracle(0.05) == pytest.approx(0.3 + 4 / 9, abs=1e-14)
        assert oracle(0.2) == pytest.approx(1.0, abs=1e-14), "every gap is covered once 2t >= 1/3"

    def test_a_string_telescopes(self):
        oracle = StringOracle(FractalString.a_string(1.0))
        t = 0.01
        # l_j = 1/(j(j+1)) > 0.02 for j <= 6
        assert oracle(t) == pytest.approx(2 * t * 6 + 1 / 7, abs=1e-14)

    def test_saturation_values(self, handles):
        gasket = handles.oracle("gasket")
        assert gasket(1.0) == pytest.approx(SQRT3 / 4 + 3 + math.pi, rel=1e-12)
        assert CantorGraphOracle()(0.5) == pytest.approx(1 / 7, rel=1e-12)
        ss = SsNestOracle(0.5, 1.0)
        assert ss(1.0) == pytest.approx(ss.omega_volume, rel=1e-12)

    @pytest.mark.parametrize("name", ["cantor_string", "a_string", "gasket", "cantor_graph", "spray_square",
                                      "ss_nest", "nest", "chirp"])
    def test_monotone_and_bounded(self, handles, name):
        oracle = handles.oracle(name)
        t = np.logspace(-5, math.log10(0.5), 200)
        v = oracle(t)
        assert np.all(np.diff(v) >= -1e-12), f"{name}: V(t) must be nondecreasing"
        assert np.all(v > 0) and np.all(v <= oracle.omega_volume * (1 + 1e-12)), \
            f"{name}: V(t) must stay inside (0, |Omega|]"

    def test_torus_steiner(self, handles):
        oracle = handles.oracle("torus")
        c2 = 8 * math.pi ** 2
        assert oracle(0.1) == pytest.approx(c2 * 0.1, rel=1e-14)
        assert oracle.primitive(2, 0.1) == pytest.approx(c2 * 0.1 ** 3 / 6, rel=1e-12)


class TestPrimitives:
    """Closed-form primitives against their derivatives"""

    @pytest.mark.parametrize("name", ["cantor_string", "gasket", "cantor_graph", "spray_square", "segment"])
    def test_derivative_of_primitive(self, handles, name):
        oracle = handles.oracle(name)
        h = 1e-6
        for t in (0.0123, 0.0371):
            slope = (oracle.primitive(1, t + h) - oracle.primitive(1, t - h)) / (2 * h)
            assert slope == pytest.approx(oracle(t), rel=1e-6), f"{name}: d/dt V^[1] != V at t={t}"
            slope2 = (oracle.primitive(2, t + h) - oracle.primitive(2, t - h)) / (2 * h)
            assert slope2 == pytest.approx(oracle.primitive(1, t), rel=1e-6), f"{name}: d/dt V^[2] != V^[1]"

    def test_saturated_primitive(self):
        # int_0^2 (2 tau + 1) d tau + int_2^3 5 d tau
        assert segment_oracle(2.0).primitive(1, 3.0) == pytest.approx(11.0, rel=1e-14)

    def test_level_zero_is_volume(self, handles):
        oracle = handles.oracle("gasket")
        assert oracle.primitive(0, 0.02) == oracle(0.02)

    def test_negative_level(self):
        with pytest.raises(ParameterRangeError):
            segment_oracle(1.0).primitive(-1, 0.5)


class TestScalingWords:
    """Grouped enumeration of word scales"""

    def test_counts(self):
        scales, counts = scaling_words([0.5, 0.25], 0.1)
        assert counts.sum() == pytest.approx(7), "1 + 2 + 3 + 1 words have scale above 0.1"
        assert np.all(np.diff(scales) <= 0), "scales come largest first"
        assert np.all(scales > 0.1)


class TestDistances:
    """Exact point distances of the recursive recipes"""

    def test_gasket_hole_center(self):
        inradius = SQRT3 / 12
        d = distance_to_set((0.5, SQRT3 / 4 - inradius), GasketRecipe(), 5)
        assert d == pytest.approx(inradius, abs=1e-14), "central hole incenter sits one inradius from A"

    def test_outside_hull(self):
        assert distance_to_set((0.5, -0.1), GasketRecipe(), 5) == pytest.approx(0.1, abs=1e-14)

    def test_half_square_hole(self):
        assert distance_to_set((0.25, 0.75), HalfSquareRecipe(), 3) == pytest.approx(0.25, abs=1e-14)

    def test_depth_must_be_positive(self):
        with pytest.raises(ParameterRangeError):
            distance_to_set((0.5, 0.5), GasketRecipe(), 0)


class TestPixelOracle:
    """Cell counting with its error bound"""

    def test_segment_in_plane(self):
        t = 0.1
        value, bound = pixel_tube_volume(SegmentRecipe(), t, resolution=1024)
        exact = 2 * t + math.pi * t ** 2
        assert abs(value - exact) <= bound, f"pixel value {value} misses {exact} by more than {bound}"

    @pytest.mark.parametrize("t", [0.05, 0.1])
    def test_gasket_against_exact_spray(self, handles, t):
        value, bound = pixel_tube_volume(GasketRecipe(), t, resolution=1024)
        exact = float(handles.oracle("gasket")(t))
        assert abs(value - exact) <= max(bound, 5e-3 * exact), \
            f"pixel |A_t| = {value} against exact {exact} at t = {t} (bound {bound:.3g})"

    def test_resolution_guard(self):
        with pytest.raises(ResolutionError):
            pixel_tube_volume(SegmentRecipe(), 0.01, resolution=100)

    def test_published_half_square_has_no_oracle(self, handles):
        entry = handles.entry("half_square", normalization="published")
        with pytest.raises(ParameterRangeError):
            tube_oracle(entry)


class TestFunctionHelpers:
    """Plain-function access to the oracles"""

    def test_string(self):
        assert string_tube_volume(FractalString.cantor(), 0.05) == pytest.approx(0.3 + 4 / 9, rel=1e-12)

    def test_spray_saturates(self):
        square = SelfSimilarSpray((0.5, 0.25), (-4.0, 4.0), 1.0, 0.5, 2)
        # every copy is swallowed once t reaches the inradius
        assert spray_tube_volume(square, 0.6) == pytest.approx(1 / (1 - 0.3125), rel=1e-12)

    def test_cantor_graph(self):
        assert cantor_graph_tube_volume(0.5) == pytest.approx(1 / 7, rel=1e-12)

    def test_primitive(self):
        assert primitive_tube(segment_oracle(2.0), 0, 0.25) == pytest.approx(1.5, rel=1e-12)
        # int_0^t (2u + 1) du
        assert primitive_tube(segment_oracle(2.0), 1, 0.5) == pytest.approx(0.75, rel=1e-12)


class TestSampleSeries:
    """Sampled oracle values"""

    def test_sample(self):
        series = segment_oracle(2.0).sample(0, [0.25, 0.5, 1.0])
        assert series.level == 0
        assert series.samples == ((0.25, 1.5), (0.5, 2.0), (1.0, 3.0))

    def test_grid_must_increase(self):
        with pytest.raises(ParameterRangeError):
            segment_oracle(2.0).sample(1, [0.5, 0.25])

    def test_oscillatory_period(self):
        assert OscillatoryPeriod.from_ratio(1 / 3).p == pytest.approx(2 * math.pi / math.log(3))
        with pytest.raises(ParameterRangeError):
            OscillatoryPeriod(0.0)
