"""Tube-volume oracles and distance evaluators.

Exact oracles work from the scaling structure of each set: they enumerate
the finitely many unsaturated pieces at a given t and sum the saturated
remainder in closed form. The pixel oracle counts grid cells from exact
point distances for planar sets that have no closed-form tube function.
"""
import math
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import comb

from .errors import ParameterRangeError, QuadratureError, ResolutionError
from .models import FractalString, LengthRule, SelfSimilarSpray, TubeSampleSeries
from .zetacat import a_string_lengths, string_geometric_zeta, zeta_Lb

logger = logging.getLogger(__name__)

PIXEL_BOUND_LIMIT = 0.05
BREAKPOINT_LIMIT = 200


def scaling_words(ratios, threshold):
    """Distinct word scales lambda > threshold with multiplicities, largest first.

    Words are grouped by their exponent vector over the distinct ratios, so
    the enumeration grows polynomially in log(1/threshold).
    """
    groups = Counter(float(r) for r in ratios)
    values = list(groups)
    mult = [groups[v] for v in values]
    scales, log_counts = [], []

    def walk(i, scale, exps):
        if i == len(values):
            n = sum(exps)
            scales.append(scale)
            log_counts.append(math.lgamma(n + 1) - sum(math.lgamma(e + 1) for e in exps)
                              + sum(e * math.log(m) for e, m in zip(exps, mult)))
            return
        e, s = 0, scale
        while s > threshold:
            walk(i + 1, s, exps + [e])
            e += 1
            s *= values[i]

    walk(0, 1.0, [])
    order = np.argsort(scales)[::-1]
    return np.asarray(scales)[order], np.exp(np.asarray(log_counts))[order]


class _WordTable:
    """Sorted piece scales with cumulative power sums"""

    def __init__(self, scales, counts):
        self.scales = np.asarray(scales, dtype=float)
        self.counts = np.asarray(counts, dtype=float)
        self._cumulative = {}

    def above(self, x):
        """Number of table entries with scale > x"""
        return np.searchsorted(-self.scales, -np.asarray(x, dtype=float), side="left")

    def partial(self, e, n):
        if e not in self._cumulative:
            self._cumulative[e] = np.concatenate([[0.0], np.cumsum(self.counts * self.scales ** e)])
        return self._cumulative[e][n]


class TubeOracle:
    """V(t) = |A_t ∩ Omega| and its primitives"""
    ambient_dim = 1
    omega_volume = 1.0
    exact = True
    saturation = None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        values = self._volume(np.atleast_1d(t))
        return float(values[0]) if t.ndim == 0 else values.reshape(t.shape)

    def _volume(self, t):
        raise NotImplementedError

    def breakpoints(self, lo, hi):
        """Kinks of V inside (lo, hi), or None when there are too many to list"""
        return []

    def primitive(self, k, t):
        """k-th primitive V^[k](t) = int_0^t (t - tau)^(k-1)/(k-1)! V(tau) dtau"""
        if k < 0:
            raise ParameterRangeError("primitive level must be >= 0")
        if k == 0:
            return self(t)
        t = np.asarray(t, dtype=float)
        values = np.array([self._primitive_at(k, float(x)) for x in np.atleast_1d(t)])
        return float(values[0]) if t.ndim == 0 else values.reshape(t.shape)

    def sample(self, k, t_grid):
        """V^[k] sampled on an increasing grid"""
        ts = [float(t) for t in t_grid]
        values = np.atleast_1d(self.primitive(k, np.asarray(ts)))
        return TubeSampleSeries(k, tuple(zip(ts, (float(v) for v in values))))

    def _primitive_at(self, k, t):
        return self.quad_primitive(k, t)

    def quad_primitive(self, k, t):
        """Cauchy's formula for repeated integration, by adaptive quadrature"""
        if k == 0:
            return float(self(t))
        points = self.breakpoints(0.0, t)
        if points is not None and len(points) > BREAKPOINT_LIMIT:
            points = None
        kernel = lambda tau: (t - tau) ** (k - 1) / math.factorial(k - 1) * self(tau)
        value, err = integrate.quad(kernel, 0.0, t, points=points or None, limit=400,
                                    epsabs=1e-15, epsrel=1e-12)
        if err > 1e-9 * max(1.0, abs(value)):
            raise QuadratureError(f"V^[{k}]({t}) did not converge (error {err:.2e})")
        return value

    def _saturated_primitive(self, k, t, t_sat):
        """Taylor continuation past t_sat, where V is constant"""
        dt = t - t_sat
        value = float(self(t_sat)) * dt ** k / math.factorial(k)
        for j in range(k):
            value += self._primitive_at(k - j, t_sat) * dt ** j / math.factorial(j)
        return value


class StringOracle(TubeOracle):
    """V(t) = sum_j min(l_j, 2t), exact"""

    def __init__(self, string):
        self.string = string
        self.omega_volume = string.total_length
        self._table = None
        self._threshold = math.inf

    def _lengths_above(self, x):
        string = self.string
        if string.length_rule is LengthRule.EXPLICIT:
            lengths = np.asarray(string.lengths, dtype=float)
            return _WordTable(lengths, np.ones_like(lengths))
        if string.length_rule is LengthRule.A_STRING:
            count = _a_string_count(string.a, x)
            lengths = a_string_lengths(string.a, np.arange(1, count + 1))
            return _WordTable(lengths, np.ones_like(lengths))
        ratios, gap = string.self_similar_data()
        scales, counts = scaling_words(ratios, x / gap)
        return _WordTable(gap * scales, counts)

    def table(self, x):
        if x < self._threshold:
            self._table = self._lengths_above(x)
            self._threshold = x
        return self._table

    def _volume(self, t):
        if self.string.length_rule is LengthRule.A_STRING:
            # l_1 + ... + l_n telescopes to 1 - (n+1)^-a
            n = np.array([_a_string_count(self.string.a, 2 * x) for x in t])
            return 2 * t * n + (n + 1.0) ** (-self.string.a) * self.omega_volume
        table = self.table(2 * float(np.min(t)))
        n = table.above(2 * t)
        return 2 * t * table.partial(0, n) + self.omega_volume - table.partial(1, n)

    def power_sum(self, i):
        return string_geometric_zeta(self.string, i).real

    def _primitive_at(self, k, t):
        if self.string.length_rule is LengthRule.A_STRING and _a_string_count(self.string.a, 2 * t) > 10 ** 6:
            return self.quad_primitive(k, t)
        table = self.table(2 * t)
        n = table.above(2 * t)
        value = table.partial(0, n) * t ** (k + 1)
        for i in range(1, k + 2):
            saturated = self.power_sum(i) - table.partial(i, n)
            value -= comb(k + 1, i) * t ** (k + 1 - i) * (-0.5) ** i * saturated
        return 2 * value / math.factorial(k + 1)

    def breakpoints(self, lo, hi):
        if self.string.length_rule is LengthRule.A_STRING:
            if _a_string_count(self.string.a, 2 * max(lo, 1e-300)) > BREAKPOINT_LIMIT:
                return None
        table = self.table(2 * max(lo, 1e-300))
        half = table.scales / 2
        return sorted(set(float(x) for x in half[(half > lo) & (half < hi)]))


def _a_string_count(a, x):
    """#{j : l_j > x} for the a-string"""
    if x <= 0:
        raise ParameterRangeError("threshold must be positive")
    if a_string_lengths(a, 1) <= x:
        return 0
    lo, hi = 1, int(math.ceil((a / x) ** (1 / (a + 1)))) + 2
    while a_string_lengths(a, hi) > x:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if a_string_lengths(a, mid) > x:
            lo = mid
        else:
            hi = mid
    return lo


class SprayOracle(TubeOracle):
    """V(t) = sum over words of lambda^N V_G(t/lambda), plus the hull's outer shell"""

    def __init__(self, spray, hull=None, delta=None):
        self.spray = spray
        self.ambient_dim = spray.ambient_dim
        self.hull = None if hull is None else tuple(hull)
        self.saturation = delta if hull is not None else None
        self.omega_volume = spray.generator_volume * self._totals(spray.ambient_dim)
        if self.hull is not None:
            self.omega_volume += self._hull(delta)
        self._table = None
        self._threshold = math.inf

    def _totals(self, e):
        """sum over all words of lambda^e"""
        return 1.0 / (1.0 - sum(r ** e for r in self.spray.ratios))

    def _words(self, x):
        return _WordTable(*scaling_words(self.spray.ratios, x))

    def table(self, x):
        if x < self._threshold:
            self._table = self._words(x)
            self._threshold = x
        return self._table

    def _hull(self, t, k=0):
        N = self.ambient_dim
        return sum(c * t ** (N - i + k) * math.factorial(N - i) / math.factorial(N - i + k)
                   for i, c in enumerate(self.hull) if c)

    def _volume(self, t):
        if self.saturation is not None:
            t = np.minimum(t, self.saturation)
        spray, N = self.spray, self.ambient_dim
        table = self.table(float(np.min(t)) / spray.inradius)
        n = table.above(t / spray.inradius)
        value = spray.generator_volume * (self._totals(N) - table.partial(N, n))
        for i, kappa in enumerate(spray.kappa):
            if kappa:
                value = value + kappa * t ** (N - i) * table.partial(i, n)
        if self.hull is not None:
            value = value + self._hull(t)
        return value

    def _moment(self, j):
        """int_0^g u^j (V_G(u) - |G|) du"""
        spray, N = self.spray, self.ambient_dim
        g = spray.inradius
        return (sum(kappa * g ** (N - i + j + 1) / (N - i + j + 1) for i, kappa in enumerate(spray.kappa))
                - spray.generator_volume * g ** (j + 1) / (j + 1))

    def _primitive_at(self, k, t):
        if self.saturation is not None and t > self.saturation:
            return self._saturated_primitive(k, t, self.saturation)
        spray, N = self.spray, self.ambient_dim
        table = self.table(t / spray.inradius)
        n = table.above(t / spray.inradius)
        value = 0.0
        for i, kappa in enumerate(spray.kappa):
            if kappa:
                value += (kappa * table.partial(i, n) * t ** (N - i + k)
                          * math.factorial(N - i) / math.factorial(N - i + k))
        value += spray.generator_volume * t ** k / math.factorial(k) * (self._totals(N) - table.partial(N, n))
        for j in range(k):
            e = N + 1 + j
            weight = comb(k - 1, j) * t ** (k - 1 - j) * (-1) ** j / math.factorial(k - 1)
            value += weight * self._moment(j) * (self._totals(e) - table.partial(e, n))
        if self.hull is not None:
            value += self._hull(t, k)
        return value

    def breakpoints(self, lo, hi):
        table = self.table(max(lo, 1e-300) / self.spray.inradius)
        if table.scales.size > 20 * BREAKPOINT_LIMIT:
            return None
        kinks = table.scales * self.spray.inradius
        points = set(float(x) for x in kinks[(kinks > lo) & (kinks < hi)])
        if self.saturation is not None and lo < self.saturation < hi:
            points.add(float(self.saturation))
        return sorted(points)


class CantorGraphOracle(SprayOracle):
    """Triangles under the Cantor function graph: 2^k copies at scale 3^-k, k >= 1"""

    def __init__(self):
        leg = SelfSimilarSpray((1 / 3, 1 / 3), (-0.5, 1.0), 0.5, 1.0, 2)
        super().__init__(leg)

    def _totals(self, e):
        q = 2 * 3.0 ** (-e)
        return q / (1 - q)

    def _words(self, x):
        scales, counts = scaling_words(self.spray.ratios, x)
        keep = scales < 1.0
        return _WordTable(scales[keep], counts[keep])


class SteinerOracle(TubeOracle):
    """V(t) = sum_k c_k min(t, delta)^(N-k)"""

    def __init__(self, c, delta):
        self.c = tuple(c)
        self.delta = delta
        self.ambient_dim = len(self.c) - 1
        self.saturation = delta
        self.omega_volume = float(self(delta))

    def _volume(self, t):
        t = np.minimum(t, self.delta)
        N = self.ambient_dim
        return sum(ck * t ** (N - k) for k, ck in enumerate(self.c) if ck) + 0 * t

    def _primitive_at(self, k, t):
        if t > self.delta:
            return self._saturated_primitive(k, t, self.delta)
        N = self.ambient_dim
        return sum(ck * t ** (N - i + k) * math.factorial(N - i) / math.factorial(N - i + k)
                   for i, ck in enumerate(self.c) if ck)

    def breakpoints(self, lo, hi):
        return [self.delta] if lo < self.delta < hi else []


def segment_oracle(delta):
    """|I_t ∩ I_delta| = 2 min(t, delta) + 1 for the unit interval"""
    return SteinerOracle((2.0, 1.0), delta)


class NestOracle(TubeOracle):
    """Circles of radius j^-a inside the unit disk, exact per annulus"""
    ambient_dim = 2

    def __init__(self, a):
        if a <= 0:
            raise ParameterRangeError("nest needs a > 0")
        self.a = a
        self.omega_volume = math.pi

    def _volume(self, t):
        out = np.empty_like(t)
        for idx, x in enumerate(t):
            n = _a_string_count(self.a, 2 * x)
            j = np.arange(1, n + 1, dtype=float)
            radii = j ** -self.a + (j + 1) ** -self.a
            out[idx] = 2 * math.pi * x * radii.sum() + math.pi * (n + 1.0) ** (-2 * self.a)
        return out

    def breakpoints(self, lo, hi):
        if _a_string_count(self.a, 2 * max(lo, 1e-300)) > BREAKPOINT_LIMIT:
            return None
        n = _a_string_count(self.a, 2 * lo)
        half = a_string_lengths(self.a, np.arange(1, n + 1)) / 2
        return sorted(float(x) for x in half[(half > lo) & (half < hi)])


class SsNestOracle(TubeOracle):
    """Circles of radius a^k, k >= 0, as an absolute set with delta = 1"""
    ambient_dim = 2

    def __init__(self, a, delta=1.0):
        if not 0 < a < 1:
            raise ParameterRangeError("self-similar nest needs 0 < a < 1")
        self.a = a
        self.delta = delta
        self.saturation = delta
        self.omega_volume = math.pi * (1 + delta) ** 2

    def _count(self, x):
        # annuli a^k (1 - a) > 2x
        ratio = 2 * x / (1 - self.a)
        if ratio >= 1:
            return 0
        return int(math.floor(math.log(ratio) / math.log(self.a))) + 1

    def _volume(self, t):
        a = self.a
        out = np.empty_like(t)
        for idx, x in enumerate(np.minimum(t, self.delta)):
            n = self._count(x)
            inner = 2 * math.pi * x * (1 + a) * (1 - a ** n) / (1 - a) + math.pi * a ** (2 * n)
            out[idx] = math.pi * (2 * x + x * x) + inner
        return out

    def breakpoints(self, lo, hi):
        n = self._count(max(lo, 1e-300))
        half = (1 - self.a) * self.a ** np.arange(n + 1) / 2
        points = [float(x) for x in half if lo < x < hi]
        if lo < self.delta < hi:
            points.append(self.delta)
        return sorted(points)


class ChirpOracle(TubeOracle):
    """Rectangles of width l_j and height j^(alpha/beta) between the chirp's vertical segments"""
    ambient_dim = 2

    def __init__(self, alpha, beta):
        if not (-1 < alpha < 0 < beta):
            raise ParameterRangeError("chirp needs -1 < alpha < 0 < beta")
        self.a, self.b = 1 / beta, -alpha / beta
        self.omega_volume = zeta_Lb(self.a, self.b, 1.0, 2.0).real

    def _volume(self, t):
        out = np.empty_like(t)
        for idx, x in enumerate(t):
            n = _a_string_count(self.a, 2 * x)
            j = np.arange(1, n + 1, dtype=float)
            heights = j ** self.b
            head = float(np.sum(heights * a_string_lengths(self.a, j)))
            out[idx] = 2 * x * heights.sum() + self.omega_volume - head
        return out

    def breakpoints(self, lo, hi):
        if _a_string_count(self.a, 2 * max(lo, 1e-300)) > BREAKPOINT_LIMIT:
            return None
        n = _a_string_count(self.a, 2 * lo)
        half = a_string_lengths(self.a, np.arange(1, n + 1)) / 2
        return sorted(float(x) for x in half[(half > lo) & (half < hi)])


# Point distances

def _segment_distance(p, a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    ab = b - a
    u = np.clip(((p - a) @ ab) / (ab @ ab), 0.0, 1.0)
    return np.hypot(*(p - a - u[:, None] * ab).T)


def polygon_distance(p, vertices):
    """Distance from points to the boundary of a polygon"""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    edges = list(zip(vertices, vertices[1:] + vertices[:1]))
    return np.min([_segment_distance(p, a, b) for a, b in edges], axis=0)


def _convex_contains(p, vertices):
    inside = np.ones(len(p), dtype=bool)
    for (x0, y0), (x1, y1) in zip(vertices, vertices[1:] + vertices[:1]):
        inside &= (x1 - x0) * (p[:, 1] - y0) - (y1 - y0) * (p[:, 0] - x0) > 0
    return inside


@dataclass(frozen=True)
class Region:
    """Integration region: bounding box plus membership test"""
    lo: tuple
    hi: tuple
    contains: Callable

    @property
    def ambient_dim(self):
        return len(self.lo)

    @property
    def box_volume(self):
        return float(np.prod(np.subtract(self.hi, self.lo)))


class PlanarRecipe:
    """Recursive description of a set with exact point distances"""
    name = "recipe"
    ambient_dim = 2
    ratio_max = 0.5

    def depth_for(self, t):
        return int(math.ceil(math.log(1 / t) / math.log(1 / self.ratio_max))) + 2

    def distance(self, points, depth):
        raise NotImplementedError

    def box(self, t):
        raise NotImplementedError

    def omega_contains(self, points):
        return np.ones(len(points), dtype=bool)

    def hull_region(self):
        raise ParameterRangeError(f"{self.name} has no hull region")

    def neighborhood_region(self, delta, depth=48):
        lo, hi = self.box(delta)
        return Region(tuple(lo), tuple(hi), lambda p: self.distance(p, depth) < delta)


class SegmentRecipe(PlanarRecipe):
    """Unit segment [0,1] x {0} in the plane"""
    name = "segment"

    def distance(self, points, depth=1):
        return _segment_distance(np.atleast_2d(points), (0.0, 0.0), (1.0, 0.0))

    def box(self, t):
        return np.array([-t, -t]), np.array([1 + t, t])


class IntervalRecipe(PlanarRecipe):
    """Unit interval on the line, Omega = its inner delta-neighborhood minus the interval"""
    name = "interval"
    ambient_dim = 1

    def distance(self, points, depth=1):
        x = np.asarray(points, dtype=float).reshape(-1)
        return np.maximum(np.maximum(-x, x - 1), 0.0)

    def box(self, t):
        return np.array([-t]), np.array([1 + t])

    def neighborhood_region(self, delta, depth=1):
        return Region((-delta,), (1 + delta,),
                      lambda p: (self.distance(p) > 0) & (self.distance(p) < delta))


class SprayRecipe(PlanarRecipe):
    """Convex hull minus scaled copies of an open generator"""
    hull = ()
    residual = 0.0

    def hole_distance(self, p):
        """Distance to the hole boundary for points in the level-0 hole, NaN elsewhere"""
        raise NotImplementedError

    def descend(self, p):
        """Map points into the coordinates of the child piece containing them"""
        raise NotImplementedError

    def distance(self, points, depth):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty(len(p))
        inside = _convex_contains(p, self.hull)
        out[~inside] = polygon_distance(p[~inside], self.hull)
        idx = np.flatnonzero(inside)
        local = p[inside]
        scale = np.ones(len(idx))
        for _ in range(depth):
            if idx.size == 0:
                break
            hole = self.hole_distance(local)
            hit = ~np.isnan(hole)
            out[idx[hit]] = scale[hit] * hole[hit]
            idx, local, scale = idx[~hit], local[~hit], scale[~hit]
            local = self.descend(local)
            scale = scale * self.ratio_max
        out[idx] = scale * self.residual
        return out

    def box(self, t):
        v = np.asarray(self.hull)
        return v.min(axis=0) - t, v.max(axis=0) + t

    def hull_region(self):
        v = np.asarray(self.hull)
        return Region(tuple(v.min(axis=0)), tuple(v.max(axis=0)), lambda p: _convex_contains(p, self.hull))


class GasketRecipe(SprayRecipe):
    name = "gasket"
    h = math.sqrt(3) / 2
    hull = [(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)]
    residual = math.sqrt(3) / 12

    def hole_distance(self, p):
        x, y = p[:, 0], p[:, 1]
        top = self.h / 2
        inside = (y < top) & (y > math.sqrt(3) * np.abs(x - 0.5))
        d = np.minimum(top - y, np.minimum(np.abs(math.sqrt(3) * (x - 0.5) - y) / 2,
                                           np.abs(-math.sqrt(3) * (x - 0.5) - y) / 2))
        return np.where(inside, d, np.nan)

    def descend(self, p):
        x, y = p[:, 0], p[:, 1]
        upper = y >= self.h / 2
        right = ~upper & (x >= 0.5)
        nx = np.where(upper, 2 * x - 0.5, np.where(right, 2 * x - 1, 2 * x))
        ny = np.where(upper, 2 * y - self.h, 2 * y)
        return np.column_stack([nx, ny])


class HalfSquareRecipe(SprayRecipe):
    """Unit square minus the open top-left and bottom-right quarters, recursively"""
    name = "half_square"
    hull = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    residual = 0.25

    def hole_distance(self, p):
        x, y = p[:, 0], p[:, 1]
        top_left = (x < 0.5) & (y > 0.5)
        bottom_right = (x > 0.5) & (y < 0.5)
        d_tl = np.minimum(np.minimum(x, 0.5 - x), np.minimum(y - 0.5, 1 - y))
        d_br = np.minimum(np.minimum(x - 0.5, 1 - x), np.minimum(y, 0.5 - y))
        return np.where(top_left, d_tl, np.where(bottom_right, d_br, np.nan))

    def descend(self, p):
        upper = (p[:, 0] > 0.5) | (p[:, 1] > 0.5)
        return np.where(upper[:, None], 2 * p - 1, 2 * p)


class ThirdSquareRecipe(SprayRecipe):
    """Unit square minus the open hexagon left by the corner squares [0,1/3]^2 and [2/3,1]^2"""
    name = "third_square"
    hull = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    ratio_max = 1 / 3
    residual = 1 / 6

    def hole_distance(self, p):
        x, y = p[:, 0], p[:, 1]
        low = (x <= 1 / 3) & (y <= 1 / 3)
        high = (x >= 2 / 3) & (y >= 2 / 3)
        d_low = np.hypot(np.maximum(x - 1 / 3, 0), np.maximum(y - 1 / 3, 0))
        d_high = np.hypot(np.maximum(2 / 3 - x, 0), np.maximum(2 / 3 - y, 0))
        d = np.minimum(np.minimum(np.minimum(x, 1 - x), np.minimum(y, 1 - y)), np.minimum(d_low, d_high))
        return np.where(low | high, np.nan, d)

    def descend(self, p):
        high = (p[:, 0] >= 2 / 3) & (p[:, 1] >= 2 / 3)
        return np.where(high[:, None], 3 * p - 2, 3 * p)


class NestRecipe(PlanarRecipe):
    """Circles of radius j^-a; Omega is the open unit disk"""
    name = "nest"

    def __init__(self, a):
        self.a = a

    def distance(self, points, depth=1):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        rho = np.hypot(p[:, 0], p[:, 1])
        with np.errstate(divide="ignore"):
            j = np.floor(np.where(rho > 0, rho, 1e-300) ** (-1 / self.a))
        j = np.maximum(j, 1)
        d = np.minimum(np.abs(rho - j ** -self.a), np.abs(rho - (j + 1) ** -self.a))
        return np.minimum(np.minimum(d, rho), np.abs(rho - 1))

    def box(self, t):
        return np.array([-1 - t, -1 - t]), np.array([1 + t, 1 + t])

    def omega_contains(self, points):
        p = np.atleast_2d(points)
        return np.hypot(p[:, 0], p[:, 1]) < 1

    def hull_region(self):
        return Region((-1.0, -1.0), (1.0, 1.0), self.omega_contains)


class SsNestRecipe(PlanarRecipe):
    """Circles of radius a^k, k >= 0"""
    name = "ss_nest"

    def __init__(self, a):
        self.a = a
        self.ratio_max = a

    def distance(self, points, depth=1):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        rho = np.hypot(p[:, 0], p[:, 1])
        with np.errstate(divide="ignore"):
            k = np.floor(np.log(np.where(rho > 0, rho, 1e-300)) / math.log(self.a))
        k = np.maximum(k, 0)
        d = np.minimum(np.abs(rho - self.a ** k), np.abs(rho - self.a ** (k + 1)))
        return np.minimum(d, rho)

    def box(self, t):
        return np.array([-1 - t, -1 - t]), np.array([1 + t, 1 + t])


def distance_to_set(x, recipe, depth):
    """Euclidean distance from point(s) x to the depth-level prefractal"""
    if depth < 1:
        raise ParameterRangeError("depth must be >= 1")
    x = np.asarray(x, dtype=float)
    d = recipe.distance(np.atleast_2d(x) if recipe.ambient_dim == 2 else x.reshape(-1, 1), depth)
    return float(d[0]) if x.ndim <= 1 and d.size == 1 else d


class PixelOracle(TubeOracle):
    """Cell-center counting on a uniform grid of exact point distances"""
    exact = False

    def __init__(self, recipe, depth, resolution, t_max, band_rows=256):
        if resolution < 8:
            raise ParameterRangeError("resolution must be at least 8 cells per unit")
        self.recipe = recipe
        self.depth = depth
        self.resolution = resolution
        self.h = 1.0 / resolution
        self.ambient_dim = 2
        lo, hi = recipe.box(t_max)
        xs = np.arange(lo[0] + self.h / 2, hi[0], self.h)
        ys = np.arange(lo[1] + self.h / 2, hi[1], self.h)
        chunks = []
        for start in range(0, len(ys), band_rows):
            gx, gy = np.meshgrid(xs, ys[start:start + band_rows])
            pts = np.column_stack([gx.ravel(), gy.ravel()])
            pts = pts[recipe.omega_contains(pts)]
            chunks.append(recipe.distance(pts, depth))
        self.distances = np.sort(np.concatenate(chunks))
        self.omega_volume = self.distances.size * self.h ** 2
        logger.debug("pixel grid for %s: %d cells, depth %d", recipe.name, self.distances.size, depth)

    def _volume(self, t):
        return np.searchsorted(self.distances, t, side="left") * self.h ** 2

    def error_bound(self, t):
        band = self.h / math.sqrt(2)
        t = np.asarray(t, dtype=float)
        count = (np.searchsorted(self.distances, t + band, side="right")
                 - np.searchsorted(self.distances, t - band, side="left"))
        return count * self.h ** 2


def pixel_tube_volume(recipe, t, depth=None, resolution=2048):
    """(value, error bound) of |A_t ∩ Omega| by cell counting"""
    depth = recipe.depth_for(t) if depth is None else depth
    if resolution < 8 / t:
        raise ResolutionError(f"resolution {resolution} is below 8/t = {8 / t:.0f}")
    oracle = PixelOracle(recipe, depth, resolution, t_max=t)
    value, bound = float(oracle(t)), float(oracle.error_bound(t))
    if bound > PIXEL_BOUND_LIMIT * value:
        raise ResolutionError(f"pixel error bound {bound:.3g} exceeds 5% of {value:.3g}")
    return value, bound


def string_tube_volume(string, t):
    return StringOracle(string)(t)


def spray_tube_volume(spray, t):
    return SprayOracle(spray)(t)


def cantor_graph_tube_volume(t):
    return CantorGraphOracle()(t)


def primitive_tube(oracle, k, t):
    return oracle.primitive(k, t)


def spray_from_params(params, ambient_dim):
    return SelfSimilarSpray(tuple(params["ratios"]), tuple(params["kappa"]), params["generator_volume"],
                            params["inradius"], ambient_dim)


def planar_recipe(entry):
    """Point-distance recipe of a planar catalog entry"""
    family = entry.params.get("closed_form") or entry.params["family"]
    if family == "segment":
        return SegmentRecipe()
    if family == "gasket":
        return GasketRecipe()
    if family == "half_square":
        return HalfSquareRecipe()
    if family == "third_square":
        return ThirdSquareRecipe()
    if family == "nest":
        return NestRecipe(entry.params["a"])
    if family == "ss_nest":
        return SsNestRecipe(entry.params["a"])
    raise ParameterRangeError(f"{entry.name} has no planar recipe")


def tube_oracle(entry, resolution=2048, t_min=1e-2):
    """Tube-volume oracle of a catalog entry (exact where the geometry allows)"""
    p = entry.params
    family = p.get("closed_form") or p["family"]
    if family == "segment":
        return segment_oracle(entry.delta)
    if family == "cantor_string":
        return StringOracle(FractalString.cantor())
    if family == "a_string":
        return StringOracle(FractalString.a_string(p["a"]))
    if family == "cantor_graph":
        return CantorGraphOracle()
    if family == "nest":
        return NestOracle(p["a"])
    if family == "ss_nest":
        return SsNestOracle(p["a"], entry.delta)
    if family == "chirp":
        return ChirpOracle(p["alpha"], p["beta"])
    if family == "steiner":
        return SteinerOracle(p["c"], entry.delta)
    if family == "third_square":
        recipe = ThirdSquareRecipe()
        return PixelOracle(recipe, recipe.depth_for(t_min), resolution, t_max=entry.validity_t_max or 0.5)
    if "ratios" in p:
        if family == "half_square" and p.get("normalization") == "published":
            raise ParameterRangeError("the published 1/2-square normalization has no geometric oracle")
        return SprayOracle(spray_from_params(p, entry.ambient_dim), hull=p.get("hull"), delta=entry.delta)
    raise ParameterRangeError(f"no tube oracle for {entry.name}")
