import cmath
import math

import pytest

from app import zetacat
from app.complexcore import contour_laurent
from app.errors import DeltaTooSmallError, MismatchError, ParameterRangeError, PoleError
from app.geometry import StringOracle
from app.models import FractalString, SteinerCoefficients, ZetaKind
from app.zetacat import (binomial_series, distance_from_tube, lb_pole, published_half_square_zeta, scale_zeta,
                         string_geometric_zeta, steiner_tube_zeta, tube_from_distance, zeta_Lb)
from app.zetanum import numeric_tube_zeta

LOG3 = math.log(3)
D_CANTOR = math.log(2) / LOG3


def close(got, want, rel=1e-7):
    return abs(got - want) <= rel * max(1.0, abs(want))


class TestClosedFormResidues:
    """Contour residues of the catalog closed forms against their known values"""

    def test_cantor_string(self, handles):
        z = handles.zeta("cantor_string")
        res = contour_laurent(z, D_CANTOR).residue
        want = 2 ** -D_CANTOR / (D_CANTOR * LOG3)
        assert close(res, want), f"res(zeta, D) = {res}, expected {want}"

    def test_gasket(self, handles):
        z = handles.zeta("gasket")
        res0 = contour_laurent(z, 0.0).residue
        assert close(res0, 3 * math.sqrt(3) + 2 * math.pi), f"res at 0 = {res0}"
        res1 = contour_laurent(z, 1.0).residue
        assert abs(res1) < 1e-7, f"the gasket has no pole at 1, residue {res1}"

    def test_carpet(self, handles):
        z = handles.zeta("carpet3")
        expected = {2: 96 / 17, 1: 6 * math.pi + 24 / 23, 0: 4 * math.pi - 24 / 25}
        for omega, want in expected.items():
            res = contour_laurent(z, float(omega)).residue
            assert close(res, want), f"res(zeta, {omega}) = {res}, expected {want}"

    def test_cantor_graph_rows(self, handles):
        z = handles.zeta("cantor_graph")
        p = 2 * math.pi / LOG3
        for k in range(-5, 6):
            w = complex(D_CANTOR, k * p)
            res = contour_laurent(z, w).residue
            want = 1 / (LOG3 * (w - 1) * w)
            assert close(res, want), f"row {k}: residue {res}, expected {want}"

    def test_row_residues_match_analytic_poles(self, handles):
        z = handles.zeta("gasket")
        specs = z.poles(re_min=1.0, im_max=20.0)
        assert len(specs) == 5, f"expected rows k = -2..2, got {[p.location for p in specs]}"
        for spec in specs:
            res = contour_laurent(z, spec.location).residue
            assert close(res, spec.principal[-1]), f"pole {spec.location}: {res} vs {spec.principal}"

    def test_ss_nest_pole_at_one(self, handles):
        a = handles.entry("ss_nest").params["a"]
        res = contour_laurent(handles.zeta("ss_nest"), 1.0).residue
        assert close(res, 4 * math.pi / (1 - a)), f"res at 1 = {res}"


class TestFunctionalEquations:
    """Tube, shell and Mellin zeta functions against direct quadrature of V(t)"""

    OFFSETS = [0.6 + 0j, 0.8 + 2j, 1.0 - 7j, 1.2 + 10j]

    @pytest.mark.parametrize("name", ["cantor_string", "gasket"])
    def test_tube_zeta(self, handles, name):
        entry = handles.entry(name)
        tube = handles.zeta(name, ZetaKind.TUBE)
        oracle = handles.oracle(name)
        for offset in self.OFFSETS:
            s = entry.dimension + offset
            numeric = numeric_tube_zeta(oracle, s, entry.delta, dimension=entry.dimension)
            closed = tube(s)
            assert close(numeric, closed, 1e-6), f"{name} at s={s}: quadrature {numeric} vs closed form {closed}"

    def test_shell_is_distance_over_n_minus_s(self, handles):
        dz = handles.zeta("gasket")
        shell = handles.zeta("gasket", ZetaKind.SHELL)
        for s in (2.2 + 1j, 1.9 - 3j):
            assert abs(shell(s) * (2 - s) - dz(s)) < 1e-11 * abs(dz(s)), f"shell relation fails at {s}"

    def test_mellin_zeta_quadrature(self, handles):
        """zeta/(N - s) = tube zeta + |A_delta ∩ Omega| delta^(s-N)/(N-s) inside the strip (D, N)"""
        entry = handles.entry("cantor_string")
        mellin = handles.zeta("cantor_string", ZetaKind.MELLIN)
        oracle = handles.oracle("cantor_string")
        B = mellin.boundary_volume
        for s in (0.9 + 0j, 0.92 + 3j, 0.95 - 1j):
            numeric = numeric_tube_zeta(oracle, s, entry.delta) + B * entry.delta ** (s - 1) / (1 - s)
            assert close(numeric, mellin(s), 1e-6), f"Mellin zeta at {s}: {numeric} vs {mellin(s)}"

    def test_mellin_pole_at_n(self, handles):
        mellin = handles.zeta("gasket", ZetaKind.MELLIN)
        spec = next(p for p in mellin.isolated if abs(p.location - 2) < 1e-12)
        omega = handles.entry("gasket").omega_volume
        assert close(spec.principal[-1], -omega, 1e-9), f"residue at N is {spec.principal}, expected -{omega}"
        assert mellin.strip[1] == 2.0

    def test_delta_too_small(self, handles):
        with pytest.raises(DeltaTooSmallError):
            handles.zeta("cantor_string", ZetaKind.MELLIN, delta=0.1)


class TestTransforms:
    """Distance/tube conversions and scaling"""

    def test_distance_tube_identity(self, handles):
        dz = handles.zeta("cantor_graph")
        back = distance_from_tube(tube_from_distance(dz))
        for s in (1.5 + 2j, 0.3 - 1j):
            assert abs(back(s) - dz(s)) < 1e-10 * abs(dz(s)), f"conversion changed zeta at {s}"

    def test_segment_tube_zeta(self, handles):
        """Tube zeta of [0,1] is 2 delta^s/s + delta^(s-1)/(s-1), pole at 1 with residue 1"""
        tz = handles.zeta("segment", ZetaKind.TUBE)
        delta = tz.delta
        s = 0.5 + 1j
        want = 2 * delta ** s / s + delta ** (s - 1) / (s - 1)
        assert close(tz(s), want, 1e-12), f"tube zeta {tz(s)}, expected {want}"
        spec = next(p for p in tz.isolated if abs(p.location - 1) < 1e-12)
        assert close(spec.principal[-1], 1.0, 1e-9), f"residue at N = {spec.principal}"

    def test_kind_mismatch(self, handles):
        tz = handles.zeta("segment", ZetaKind.TUBE)
        with pytest.raises(MismatchError):
            tube_from_distance(tz)

    def test_scaling(self, handles):
        dz = handles.zeta("cantor_string")
        scaled = scale_zeta(dz, 2.0)
        s = 1.4 + 0.7j
        assert abs(scaled(s) - 2 ** s * dz(s)) < 1e-12 * abs(dz(s))
        assert scaled.delta == 2 * dz.delta
        with pytest.raises(ParameterRangeError):
            scale_zeta(dz, -1.0)


class TestStrings:
    """Geometric zeta functions of fractal strings"""

    def test_cantor_closed_form(self):
        cantor = FractalString.cantor()
        for s in (1.0 + 0j, 0.8 + 2j):
            closed = string_geometric_zeta(cantor, s)
            direct = string_geometric_zeta(cantor, s, direct=True)
            assert abs(closed - direct) < 1e-11, f"Cantor zeta_L at {s}: {closed} vs {direct}"

    def test_self_similar_scaling(self):
        base = FractalString.self_similar((0.25, 0.5))
        scaled = FractalString.self_similar((0.25, 0.5), total_length=3.0)
        s = 1.1 + 0.4j
        assert abs(string_geometric_zeta(scaled, s) - 3.0 ** s * string_geometric_zeta(base, s)) < 1e-12

    @pytest.mark.parametrize("a, s", [(1.0, 2.0), (1.0, 0.8 + 1j), (1.0, 0.8 + 3j), (2.0, 2.0), (2.0, 0.5 + 2j),
                                      (0.5, 2.0), (0.5, 1.5 + 1j)])
    def test_a_string_continuation(self, a, s):
        string = FractalString.a_string(a)
        fast = string_geometric_zeta(string, s)
        direct = string_geometric_zeta(string, s, direct=True)
        assert close(fast, direct), f"a={a}, s={s}: {fast} vs {direct}"

    @pytest.mark.parametrize("a, want", [(1.0, [1, -1, 1, -1]), (2.0, [1, -1.5, 2, -2.5])])
    def test_binomial_series_integer_a(self, a, want):
        """l_j j^(a+1)/a in powers of 1/j: 1/(1+x) for a = 1, (1-(1+x)^-2)/(2x) for a = 2"""
        got = binomial_series(a, 1.0, 3)
        assert all(abs(g - w) < 1e-14 for g, w in zip(got, want)), f"a={a}: {got}"

    @pytest.mark.parametrize("a", [1.0, 2.0])
    def test_integer_a_continuation_is_continuous(self, a):
        s = -0.2 + 5j
        at = zeta_Lb(a, 0.0, 0.0, s)
        near = zeta_Lb(a + 1e-7, 0.0, 0.0, s)
        assert abs(at - near) < 1e-4 * max(1.0, abs(at)), f"a={a}: {at} vs {near} at a+1e-7"

    @pytest.mark.parametrize("a", [1.0, 2.0])
    def test_integer_a_lower_poles_finite(self, a):
        for m in range(1, 5):
            _, residue = lb_pole(a, -a, 1.0, m)
            assert cmath.isfinite(complex(residue)), f"residue of pole {m} for a={a} is {residue}"

    def test_non_finite_coefficients_raise(self, monkeypatch):
        monkeypatch.setattr(zetacat, "_h_coefficients", lambda a, n: (0.0,) + (math.nan,) * n)
        with pytest.raises(PoleError):
            zeta_Lb(1.5, 0.0, 0.0, 0.8 + 3j)

    def test_a_string_leading_pole(self):
        a = 1.0
        D, residue = lb_pole(a, 0.0, 0.0, 0)
        assert abs(D - 0.5) < 1e-15
        assert abs(residue - a ** D / (a + 1)) < 1e-14
        eps = 1e-6
        approx = eps * zeta_Lb(a, 0.0, 0.0, D + eps)
        assert abs(approx - residue) < 1e-4, f"(s - D) zeta near D is {approx}, residue {residue}"

    def test_telescoping_lengths(self):
        """a = 1 gives l_j = 1/(j(j+1)), so zeta_L(1) = 1"""
        assert abs(zeta_Lb(1.0, 0.0, 0.0, 1.0) - 1.0) < 1e-10

    def test_power_sums_feed_oracle(self):
        oracle = StringOracle(FractalString.cantor())
        assert abs(oracle.power_sum(1) - 1.0) < 1e-14, "Cantor lengths sum to 1"


class TestHalfSquare:
    """Geometric and published normalizations of the 1/2-square"""

    def test_interior_ratio(self, handles):
        geometric = handles.zeta("half_square")
        delta = geometric.delta
        s = 2.5 + 0.5j
        hull = 4 * delta ** (s - 1) / (s - 1) + 2 * math.pi * delta ** s / s
        published = complex(published_half_square_zeta(s, delta))
        ratio = (geometric(s) - hull) / (published - hull)
        assert abs(ratio - 16) < 1e-10, f"interior terms differ by {ratio}, expected 16"

    def test_published_omega(self, handles):
        geometric = handles.entry("half_square")
        published = handles.entry("half_square", normalization="published")
        assert abs(geometric.omega_volume - published.omega_volume - 15 / 16) < 1e-12

    def test_double_pole_at_one(self, handles):
        exp = contour_laurent(handles.zeta("half_square"), 1.0)
        assert exp.order == 2, f"order {exp.order} at s = 1"
        assert close(exp.principal[0], 4 / math.log(2)), f"c_-2 = {exp.principal[0]}"


class TestSteiner:
    """Sets of positive reach"""

    def test_torus(self, handles):
        entry = handles.entry("torus")
        assert entry.dimension == 2.0
        poles = handles.zeta("torus", ZetaKind.TUBE).poles()
        assert [complex(p.location) for p in poles] == [2 + 0j]
        assert close(poles[0].principal[-1], 8 * math.pi ** 2, 1e-9)

    def test_segment_coefficients(self):
        z = steiner_tube_zeta(SteinerCoefficients((2.0, 1.0), 2.0))
        # 2 * 2^2 / 2 + 2^1 / 1
        assert close(z(2.0), 6.0, 1e-12)
        assert z.dimension == 1.0
        assert sorted(complex(p.location).real for p in z.poles()) == [0.0, 1.0]
