import math

import mpmath
import numpy as np
import pytest

from app.complexcore import (contour_laurent, find_moran_roots, gauss_legendre_panels, hurwitz_tail,
                             lattice_base, moran_dimension, pochhammer, riemann_zeta, winding_count)
from app.errors import GammaPoleError, ParameterRangeError, PoleError
from app.models import Rectangle

LOG3 = math.log(3)


class TestRiemannZeta:
    """Riemann zeta against mpmath on both sides of the reflection cut"""

    @pytest.mark.parametrize("s", [2 + 0j, 0.5 + 10j, 2 + 3j, -1 + 0j, -1.5 + 0.5j, -5 + 2j, -7.5 + 0j, 0.3 - 40j])
    def test_matches_mpmath(self, s):
        got = riemann_zeta(s)
        want = complex(mpmath.zeta(s))
        assert abs(got - want) <= 1e-10 * max(1.0, abs(want)), f"zeta({s}) = {got}, expected {want}"

    def test_special_values(self):
        assert abs(riemann_zeta(2) - math.pi ** 2 / 6) < 1e-13, "zeta(2) should be pi^2/6"
        assert abs(riemann_zeta(0) + 0.5) < 1e-13, "zeta(0) should be -1/2"
        assert abs(riemann_zeta(-1) + 1 / 12) < 1e-13, "zeta(-1) should be -1/12"
        assert riemann_zeta(-4) == 0, "trivial zeros are exact"

    def test_pole(self):
        with pytest.raises(PoleError):
            riemann_zeta(1)

    def test_conjugate_symmetry(self):
        for s in (0.5 + 7j, -3 + 1j, 4 - 2j):
            assert abs(riemann_zeta(s.conjugate()) - riemann_zeta(s).conjugate()) < 1e-12, \
                f"zeta(conj s) != conj zeta(s) at {s}"

    def test_hurwitz_tail(self):
        head = sum(n ** -2.0 for n in range(1, 10))
        tail = hurwitz_tail(2.0, 10)
        assert abs(tail - (math.pi ** 2 / 6 - head)) < 1e-13, f"tail {tail} does not complete zeta(2)"


class TestPochhammer:
    """Rising factorial and its Gamma ratio form"""

    def test_recurrence(self):
        s = np.array([0.3 + 1j, -2.5 + 0.2j, 4.0])
        for k in range(0, 5):
            lhs = pochhammer(s, k + 1)
            rhs = pochhammer(s, k) * (s + k)
            assert np.allclose(lhs, rhs, rtol=1e-14), f"(s)_(k+1) != (s)_k (s+k) for k={k}"

    def test_negative_index(self):
        s = 3.5 + 1j
        assert abs(pochhammer(s, -2) - 1 / ((s - 1) * (s - 2))) < 1e-14, "(s)_-2 = 1/((s-1)(s-2))"

    def test_against_gamma_ratio(self):
        s = 0.7 - 2j
        want = complex(mpmath.gamma(mpmath.mpc(0.7, -2) + 3) / mpmath.gamma(mpmath.mpc(0.7, -2)))
        assert abs(pochhammer(s, 3) - want) < 1e-12 * abs(want), "(s)_3 should equal Gamma(s+3)/Gamma(s)"

    def test_gamma_pole(self):
        with pytest.raises(GammaPoleError):
            pochhammer(1.0, -1)


class TestContourLaurent:
    """Laurent coefficients from circle quadrature"""

    def test_double_pole(self):
        f = lambda s: 1 / (s - 1) ** 2 + 3 / (s - 1) + 2 + (s - 1)
        exp = contour_laurent(f, 1.0)
        assert exp.order == 2, f"expected a double pole, got order {exp.order}"
        assert abs(exp.principal[0] - 1) < 1e-9, f"c_-2 = {exp.principal[0]}"
        assert abs(exp.residue - 3) < 1e-9, f"residue = {exp.residue}"
        assert abs(exp.regular[0] - 2) < 1e-9 and abs(exp.regular[1] - 1) < 1e-9

    def test_reconstruction(self):
        f = lambda s: np.exp(s) / (s - 0.5j)
        exp = contour_laurent(f, 0.5j, radius=0.3)
        for u in (0.1, 0.05j, -0.08 + 0.02j):
            s = 0.5j + u
            assert abs(exp.evaluate(s) - f(s)) < 1e-9, f"Laurent series does not reproduce f at {s}"

    def test_regular_point(self):
        exp = contour_laurent(lambda s: np.cos(s), 0.0)
        assert exp.order == 0, "cos has no pole at 0"


class TestQuadratureRule:
    """Composite Gauss-Legendre panels"""

    def test_polynomial(self):
        x, w = gauss_legendre_panels(0.0, 2.0, 3)
        assert abs(np.sum(w * x ** 3) - 4.0) < 1e-13, "int_0^2 x^3 dx = 4"
        assert len(x) == 48, "3 panels of 16 nodes"


class TestMoranRoots:
    """Solutions of sum r_j^s = 1"""

    def test_dimension(self):
        assert abs(moran_dimension([1 / 3, 1 / 3]) - math.log(2) / LOG3) < 1e-14
        assert abs(moran_dimension([0.5, 0.5, 0.5]) - math.log(3) / math.log(2)) < 1e-14

    def test_lattice_detection(self):
        base, exps = lattice_base([0.5, 0.25])
        assert abs(base - 0.5) < 1e-14 and exps == [1, 2], f"got base {base}, exponents {exps}"
        assert lattice_base([0.5, 1 / 3]) is None, "{1/2, 1/3} is nonlattice"

    def test_cantor_rows(self):
        """Roots log_3 2 + 2 pi i k / log 3 for |k| <= 50, counted by the argument principle"""
        p = 2 * math.pi / LOG3
        D = math.log(2) / LOG3
        roots = find_moran_roots([1 / 3, 1 / 3], Rectangle(0.0, 1.0, -50.5 * p, 50.5 * p))
        assert len(roots) == 101, f"expected 101 roots, got {len(roots)}"
        for k, dim in zip(range(-50, 51), roots):
            assert abs(dim.location - complex(D, k * p)) < 1e-10, f"root {k} at {dim.location}"
            assert dim.order == 1
            assert abs(dim.residue - 1 / LOG3) < 1e-10, f"residue {dim.residue} at k={k}"

    def test_golden_lattice_rows(self):
        """{1/2, 1/4} has a second row at Re = -log_2 phi, offset by half a period"""
        roots = find_moran_roots([0.5, 0.25], Rectangle(-1.0, 1.0, -5.0, 5.0))
        reals = sorted(d.location.real for d in roots if d.is_real)
        phi = (1 + math.sqrt(5)) / 2
        assert abs(reals[-1] - math.log2(phi)) < 1e-12, f"dimension row at {reals}"
        for d in roots:
            assert abs(0.5 ** d.location + 0.25 ** d.location - 1) < 1e-10, f"{d.location} is not a root"

    def test_nonlattice_roots(self):
        ratios = [0.5, 1 / 3]
        roots = find_moran_roots(ratios, Rectangle(-1.5, 1.5, -10.3, 10.3))
        assert sum(d.order for d in roots) == len(roots), "nonlattice roots are simple"
        D = moran_dimension(ratios)
        assert any(abs(d.location - D) < 1e-10 for d in roots), "real root D missing"
        for d in roots:
            value = sum(r ** d.location for r in ratios)
            assert abs(value - 1) < 1e-9, f"{d.location} is not a root"
            assert d.location.real <= D + 1e-10, "no root lies right of D"
        locations = [d.location for d in roots if abs(d.location.imag) > 1e-9]
        for w in locations:
            assert any(abs(w.conjugate() - v) < 1e-9 for v in locations), f"conjugate of {w} missing"

    def test_rejects_bad_ratios(self):
        with pytest.raises(ParameterRangeError):
            find_moran_roots([1.5], Rectangle(0, 1, -1, 1))


class TestWindingCount:
    """Argument-principle zero count"""

    def test_quadratic(self):
        f = lambda s: s ** 2 + 1
        assert winding_count(f, Rectangle(-1.0, 1.0, -2.0, 2.0)) == 2
        assert winding_count(f, Rectangle(-1.0, 1.0, 0.5, 2.0)) == 1
