"""Closed-form fractal zeta functions and the transforms between zeta kinds.

A ZetaHandle couples an evaluator with the analytic pole data the expansion
code needs: lattice pole rows with vectorized residue formulas, isolated
poles (principal part known, or None for contour extraction) and an optional
pole source for infinite real pole sequences.
"""
import cmath
import math
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.special import factorial, poch

from .complexcore import (find_moran_roots, hurwitz_tail, lattice_base, moran_dimension,
                          moran_function, riemann_zeta)
from .errors import (DeltaTooSmallError, DivergenceError, InsufficientDepthError, MismatchError,
                     ParameterRangeError, PoleError, QuadratureError, UnknownEntryError)
from .models import (LanguidityProfile, LengthRule, PoleRow, PoleSpec, Rectangle, SelfSimilarSpray,
                     SteinerCoefficients, ZetaKind, as_complex)

logger = logging.getLogger(__name__)

REMOVABLE_OFFSET = 1e-6
POLE_TOL = 1e-10
LB_DEPTH = 8
LB_HEAD = 50
LB_EXTRA = 12
LOG2 = math.log(2)
LOG3 = math.log(3)
SQRT3 = math.sqrt(3)


def _row_rank(location, period):
    """Signed row index shared by conjugate poles"""
    im = location.imag
    rank = int(math.floor(abs(im) / period + 0.5))
    return rank if im >= 0 else -rank


@dataclass(frozen=True)
class ZetaHandle:
    kind: ZetaKind
    func: Callable
    ambient_dim: int
    delta: Optional[float]
    languidity: LanguidityProfile
    name: str = ""
    vectorized: bool = False
    boundary_volume: Optional[float] = None
    omega_volume: Optional[float] = None
    dimension: Optional[float] = None
    rows: tuple = ()
    isolated: tuple = ()
    pole_source: Optional[Callable] = None
    removable: tuple = ()
    strip: Optional[tuple] = None
    period: Optional[float] = None
    validity_t_max: Optional[float] = None
    delta_min: Optional[float] = None
    notes: dict = field(default_factory=dict)

    def _offset_average(self, s):
        logger.debug("%s: removable point %s evaluated by offset average", self.name, s)
        pts = s + REMOVABLE_OFFSET * np.array([1, 1j, -1, -1j])
        return sum(complex(self.func(p)) for p in pts) / 4

    def __call__(self, s):
        s = complex(s)
        if any(abs(s - p) < REMOVABLE_OFFSET for p in self.removable):
            return as_complex(self._offset_average(s))
        with np.errstate(all="ignore"):
            return as_complex(self.func(s))

    def evaluate_many(self, points):
        points = np.asarray(points, dtype=complex)
        if self.vectorized:
            with np.errstate(all="ignore"):
                values = np.asarray(self.func(points), dtype=complex) * np.ones_like(points)
        else:
            values = np.array([complex(self.func(p)) for p in points.ravel()],
                              dtype=complex).reshape(points.shape)
        for p in self.removable:
            near = np.abs(points - p) < REMOVABLE_OFFSET
            if near.any():
                values[near] = [self._offset_average(complex(s)) for s in points[near]]
        return values

    @property
    def known_poles_hint(self):
        hints = [complex(p.location) for p in self.isolated]
        for row in self.rows:
            hints += [complex(row.base + 1j * row.period * k) for k in range(-2, 3)]
        return hints

    def poles(self, re_min=-math.inf, im_max=50.0):
        """Analytic pole candidates with Re > re_min and |Im| <= im_max"""
        specs = [p for p in self.isolated
                 if p.location.real > re_min and abs(p.location.imag) <= im_max]
        if self.pole_source is not None:
            specs += [p for p in self.pole_source(re_min, im_max)
                      if p.location.real > re_min and abs(p.location.imag) <= im_max]
        taken = [p.location for p in specs]
        for row in self.rows:
            if row.base.real <= re_min:
                continue
            ks, locs = row.locations(im_max + abs(row.base.imag))
            keep = np.abs(locs.imag) <= im_max + 1e-9
            locs = locs[keep]
            residues = None if row.residue is None else np.asarray(row.residue(locs), dtype=complex)
            for j, w in enumerate(locs):
                w = complex(w)
                if any(abs(w - q) < 1e-9 for q in taken):
                    continue
                principal = None if residues is None else (complex(residues[j]),)
                specs.append(PoleSpec(w, principal, row=_row_rank(w, row.period)))
        return specs

    def with_changes(self, **changes):
        return replace(self, **changes)


# Pole bookkeeping under multiplication by an analytic factor

def _map_spec(spec, factor):
    if spec.principal is not None and len(spec.principal) == 1:
        return replace(spec, principal=(spec.principal[0] * complex(factor(spec.location)),))
    return replace(spec, principal=None)


def _map_rows(rows, factor):
    mapped = []
    for row in rows:
        if row.residue is None:
            mapped.append(row)
            continue
        mapped.append(replace(row, residue=lambda w, r=row.residue: np.asarray(r(w)) * factor(w)))
    return tuple(mapped)


def _map_source(source, factor):
    if source is None:
        return None
    return lambda re_min, im_max: [_map_spec(p, factor) for p in source(re_min, im_max)]


def _merge_isolated(*groups):
    """Union of pole specs; coinciding simple poles add up, anything else goes to contour"""
    merged = []
    for spec in (p for group in groups for p in group):
        for i, q in enumerate(merged):
            if abs(q.location - spec.location) < 1e-12:
                if (q.principal is not None and spec.principal is not None
                        and len(q.principal) == 1 and len(spec.principal) == 1):
                    merged[i] = replace(q, principal=(q.principal[0] + spec.principal[0],))
                else:
                    merged[i] = replace(q, principal=None)
                break
        else:
            merged.append(spec)
    return tuple(merged)


# Functional-equation transforms

def tube_from_distance(dz, boundary_volume=None):
    """zeta~(s) = (zeta(s) - delta^(s-N) B) / (N - s)"""
    if dz.kind is not ZetaKind.DISTANCE:
        raise MismatchError(f"expected a distance zeta handle, got {dz.kind.value}")
    N, delta = dz.ambient_dim, dz.delta
    B = dz.boundary_volume if boundary_volume is None else boundary_volume
    if B is None:
        raise MismatchError("|A_delta ∩ Omega| is required")
    f = dz.func

    def func(s):
        return (f(s) - np.power(delta, s - N) * B) / (N - s)

    factor = lambda w: 1.0 / (N - w)
    isolated = tuple(_map_spec(p, factor) for p in dz.isolated if abs(p.location - N) > 1e-12)
    removable = tuple(p for p in dz.removable if abs(p - N) > 1e-12)
    at_n = B - dz(N).real
    if abs(at_n) > 1e-9 * max(1.0, abs(B)):
        isolated = _merge_isolated(isolated, (PoleSpec(complex(N), (complex(at_n),)),))
    else:
        removable = removable + (complex(N),)
    return dz.with_changes(kind=ZetaKind.TUBE, func=func, boundary_volume=B,
                           rows=_map_rows(dz.rows, factor), isolated=isolated,
                           pole_source=_map_source(dz.pole_source, factor), removable=removable,
                           name=f"{dz.name}:tube")


def distance_from_tube(tz, boundary_volume=None):
    """zeta(s) = delta^(s-N) B + (N - s) zeta~(s); s = N is removable"""
    if tz.kind is not ZetaKind.TUBE:
        raise MismatchError(f"expected a tube zeta handle, got {tz.kind.value}")
    N, delta = tz.ambient_dim, tz.delta
    B = tz.boundary_volume if boundary_volume is None else boundary_volume
    if B is None:
        raise MismatchError("|A_delta ∩ Omega| is required")
    for p in tz.isolated:
        if abs(p.location - N) < 1e-12 and p.principal is not None and len(p.principal) > 1:
            raise MismatchError(f"tube zeta has a pole of order {len(p.principal)} at s = N")
    g = tz.func

    def func(s):
        return np.power(delta, s - N) * B + (N - s) * g(s)

    factor = lambda w: N - w
    isolated = tuple(_map_spec(p, factor) for p in tz.isolated if abs(p.location - N) > 1e-12)
    removable = tuple(p for p in tz.removable if abs(p - N) > 1e-12) + (complex(N),)
    return tz.with_changes(kind=ZetaKind.DISTANCE, func=func, boundary_volume=B,
                           rows=_map_rows(tz.rows, factor), isolated=isolated,
                           pole_source=_map_source(tz.pole_source, factor), removable=removable,
                           name=tz.name.removesuffix(":tube"))


def _divided_by_n_minus_s(dz, kind, suffix):
    N = dz.ambient_dim
    f = dz.func

    def func(s):
        return f(s) / (N - s)

    factor = lambda w: 1.0 / (N - w)
    at_n = dz(N)
    isolated = tuple(_map_spec(p, factor) for p in dz.isolated if abs(p.location - N) > 1e-12)
    isolated = _merge_isolated(isolated, (PoleSpec(complex(N), (-at_n,)),))
    removable = tuple(p for p in dz.removable if abs(p - N) > 1e-12)
    return dz.with_changes(kind=kind, func=func, rows=_map_rows(dz.rows, factor),
                           isolated=isolated, pole_source=_map_source(dz.pole_source, factor),
                           removable=removable, name=f"{dz.name}:{suffix}")


def shell_from_distance(dz):
    """Shell zeta zeta/(N - s), simple pole at N with residue -zeta(N)"""
    if dz.kind is not ZetaKind.DISTANCE:
        raise MismatchError(f"expected a distance zeta handle, got {dz.kind.value}")
    if dz.dimension is not None and dz.dimension >= dz.ambient_dim:
        raise ParameterRangeError("shell zeta needs D < N")
    return _divided_by_n_minus_s(dz, ZetaKind.SHELL, "shell")


def mellin_from_distance(dz):
    """Mellin zeta: holomorphic on (D, N), simple pole at N with residue -|Omega|"""
    if dz.kind is not ZetaKind.DISTANCE:
        raise MismatchError(f"expected a distance zeta handle, got {dz.kind.value}")
    if dz.delta_min is not None and dz.delta < dz.delta_min:
        raise DeltaTooSmallError(
            f"{dz.name}: delta = {dz.delta} < {dz.delta_min} leaves part of Omega outside A_delta")
    handle = _divided_by_n_minus_s(dz, ZetaKind.MELLIN, "mellin")
    return handle.with_changes(strip=(dz.dimension, float(dz.ambient_dim)))


def scale_zeta(z, lam):
    """s -> lam^s z(s), the distance zeta of the RFD scaled by lam"""
    if z.kind is not ZetaKind.DISTANCE:
        raise MismatchError(f"scaling needs a distance zeta handle, got {z.kind.value}")
    if lam <= 0:
        raise ParameterRangeError("scale factor must be positive")
    if lam == 1:
        return z
    f = z.func
    N = z.ambient_dim

    def func(s):
        return np.power(lam, s) * f(s)

    factor = lambda w: np.power(lam, w)
    scaled = lambda v: None if v is None else v * lam ** N
    return z.with_changes(func=func, delta=z.delta * lam, rows=_map_rows(z.rows, factor),
                          isolated=tuple(_map_spec(p, factor) for p in z.isolated),
                          pole_source=_map_source(z.pole_source, factor),
                          removable=z.removable,
                          boundary_volume=scaled(z.boundary_volume),
                          omega_volume=scaled(z.omega_volume),
                          delta_min=None if z.delta_min is None else z.delta_min * lam,
                          validity_t_max=None if z.validity_t_max is None else z.validity_t_max * lam,
                          name=f"{z.name}*{lam:g}")


# a-string machinery

def a_string_lengths(a, j):
    """l_j = j^-a - (j+1)^-a without cancellation"""
    j = np.asarray(j, dtype=float)
    return -np.power(j, -a) * np.expm1(-a * np.log1p(1.0 / j))


@lru_cache(maxsize=64)
def _h_coefficients(a, n):
    """h_m with l_j j^(a+1) / a = 1 + sum_{m>=1} h_m j^-m"""
    # -binom(-a, m+1) / a, written so integer a stays finite
    return tuple([0.0] + [(-1) ** m * poch(a + 1, m) / factorial(m + 1) for m in range(1, n + 1)])


def binomial_series(a, s, n):
    """e_0..e_n(s): (1 + h(x))^s = sum e_m(s) x^m"""
    h = _h_coefficients(float(a), n)
    log_c = [0j] * (n + 1)
    for m in range(1, n + 1):
        log_c[m] = h[m] - sum(k * log_c[k] * h[m - k] for k in range(1, m)) / m
    g = [s * c for c in log_c]
    e = [1 + 0j] + [0j] * n
    for m in range(1, n + 1):
        e[m] = sum(k * g[k] * e[m - k] for k in range(1, m + 1)) / m
    return e


def lb_pole(a, b, tau, m):
    """m-th pole of zeta_{L,b}(. ) shifted by tau, with its residue"""
    sp = (b + 1 - m) / (a + 1)
    e = binomial_series(a, sp, m)
    return sp + tau, a ** sp * e[m] / (a + 1)


def zeta_Lb(a, b, tau, s, M=LB_DEPTH):
    """Continuation of sum_j j^b l_j^(s - tau) over the a-string lengths l_j.

    The terms j <= J are summed directly; the tail uses the binomial
    expansion of (l_j j^(a+1)/a)^(s') in powers of 1/j, each power summed
    as a Hurwitz tail.
    """
    if a <= 0:
        raise ParameterRangeError("a-string needs a > 0")
    sp = complex(s) - tau
    x0 = (a + 1) * sp - b
    if (a + 1) * sp.real - b + M < 0.5:
        raise InsufficientDepthError(
            f"depth M = {M} does not reach Re s = {complex(s).real} (a = {a}, b = {b})")
    for m in range(M + 1):
        if abs(x0 + m - 1) < POLE_TOL:
            raise PoleError(f"zeta_Lb has a pole at s = {(b + 1 - m) / (a + 1) + tau}")
    J = max(LB_HEAD, int(2 * abs(sp)) + 1)
    depth = M + LB_EXTRA
    e = binomial_series(a, sp, depth)
    j = np.arange(1, J + 1, dtype=float)
    onep = -j * np.expm1(-a * np.log1p(1.0 / j)) / a
    head = complex(np.sum(np.exp(-x0 * np.log(j) + sp * np.log(onep))))
    e = [as_complex(c) for c in e]
    tail = sum(e[m] * hurwitz_tail(x0 + m, J + 1) for m in range(depth + 1) if e[m] != 0)
    return as_complex(a ** sp * (head + tail))


# Geometric zeta of strings

def string_geometric_zeta(string, s, direct=False):
    """zeta_L(s) = sum_j l_j^s"""
    s = complex(s)
    rule = string.length_rule
    if rule is LengthRule.EXPLICIT:
        return as_complex(sum(complex(l) ** s for l in string.lengths))
    if rule is LengthRule.A_STRING:
        abscissa = 1 / (string.a + 1)
        if direct:
            if s.real <= abscissa:
                raise DivergenceError(f"a-string Dirichlet series diverges at Re s = {s.real}")
            n = 200_000
            j = np.arange(1, n, dtype=float)
            head = complex(np.exp(s * np.log(a_string_lengths(string.a, j))).sum())
            return as_complex(head + string.a ** s * hurwitz_tail((string.a + 1) * s, n))
        return zeta_Lb(string.a, 0.0, 0.0, s)
    ratios, gap_len = string.self_similar_data()
    if direct:
        dim = moran_dimension(ratios)
        if s.real <= dim:
            raise DivergenceError(f"self-similar string diverges at Re s = {s.real} <= {dim}")
        q = sum(complex(r) ** s for r in ratios)
        total, term = 0j, complex(gap_len) ** s
        while abs(term) > 1e-17 * max(1.0, abs(total)):
            total += term
            term *= q
        return as_complex(total)
    if rule is LengthRule.CANTOR:
        return as_complex(1.0 / (3.0 ** s - 2))
    return as_complex(complex(gap_len) ** s / (1 - sum(complex(r) ** s for r in ratios)))


def string_zeta_handle(string):
    """geometric_string handle of a fractal string"""
    if string.length_rule is LengthRule.A_STRING:
        dim = 1 / (string.a + 1)
        lang = LanguidityProfile(kappa=-0.5, kappa_slope=string.a + 1, kappa_pivot=0.0)
    elif string.length_rule is LengthRule.EXPLICIT:
        dim = 0.0
        lang = LanguidityProfile(kappa=0.0)
    else:
        dim = moran_dimension(string.self_similar_data()[0])
        lang = LanguidityProfile(kappa=0.0, strong=True, B_constant=1.0)
    return ZetaHandle(kind=ZetaKind.GEOMETRIC_STRING, func=lambda s: string_geometric_zeta(string, s),
                      ambient_dim=1, delta=None, languidity=lang, name="geometric_string",
                      dimension=dim, omega_volume=string.total_length)


# Sprays

def generator_zeta(spray, delta=None):
    """zeta_{dG,G}(s) = (N - s) sum_i kappa_i g^(s-i)/(s-i), vectorized"""
    N, g = spray.ambient_dim, spray.inradius
    kappa = spray.kappa_full

    def func(s):
        s = np.asarray(s, dtype=complex)
        total = sum((N - s) * k * np.power(g, s - i) / (s - i)
                    for i, k in enumerate(kappa[:-1]) if k != 0)
        return total + spray.generator_volume * np.power(g, s - N)

    return func


def scaling_zeta(ratios):
    """Scaling zeta 1/(1 - sum r_j^s) as a handle"""
    f, _ = moran_function(ratios)
    return ZetaHandle(kind=ZetaKind.SCALING, func=lambda s: 1.0 / f(s), ambient_dim=0, delta=None,
                      languidity=LanguidityProfile(kappa=0.0), name="scaling", vectorized=True,
                      dimension=moran_dimension(ratios))


def exterior_steiner_zeta(c, delta, N):
    """sum_{k<N} (N-k) c_k delta^(s-k)/(s-k): distance zeta of a convex hull's outer shell"""
    c = tuple(c)

    def func(s):
        s = np.asarray(s, dtype=complex)
        return sum((N - k) * ck * np.power(delta, s - k) / (s - k) for k, ck in enumerate(c) if ck)

    poles = tuple(PoleSpec(complex(k), (complex((N - k) * ck),)) for k, ck in enumerate(c) if ck)
    return func, poles


def _scaling_rows(ratios, residue_factor):
    lattice = lattice_base(ratios)
    if lattice is None:
        return (), None
    base, exponents = lattice
    unit = math.log(1 / base)
    period = 2 * math.pi / unit
    degree = max(exponents)
    coeffs = np.zeros(degree + 1, dtype=complex)
    coeffs[degree] = 1.0
    for n in exponents:
        coeffs[degree - n] -= 1.0
    logs = np.log(np.asarray(ratios, dtype=float))

    def residue(w):
        w = np.asarray(w, dtype=complex)
        slope = -(np.exp(np.multiply.outer(w, logs)) * logs).sum(axis=-1)
        return residue_factor(w) / slope

    rows = []
    for x in np.roots(coeffs):
        s0 = -cmath.log(x) / unit
        if any(abs(s0 - r.base) < 1e-8 for r in rows):
            logger.warning("multiple scaling root near %s; row left to contour extraction", s0)
            rows = [r if abs(s0 - r.base) > 1e-8 else replace(r, residue=None) for r in rows]
            continue
        rows.append(PoleRow(complex(s0), period, residue, "scaling"))
    return tuple(sorted(rows, key=lambda r: -r.base.real)), period


def spray_zeta(spray, hull=None, delta=None, name="spray"):
    """zeta_G(s) / (1 - sum r_j^s), plus the hull's outer shell when hull coefficients are given"""
    N = spray.ambient_dim
    ratios = tuple(spray.ratios)
    gz = generator_zeta(spray)
    f, _ = moran_function(ratios)
    delta = spray.inradius if delta is None else delta
    interior_total = spray.generator_volume / (1 - sum(r ** N for r in ratios))

    ext_func, ext_poles = (None, ())
    if hull is not None:
        ext_func, ext_poles = exterior_steiner_zeta(hull, delta, N)

    def func(s):
        value = gz(s) / f(s)
        if ext_func is not None:
            value = value + ext_func(s)
        return value

    integer_poles = []
    for i, k in enumerate(spray.kappa):
        if k == 0:
            continue
        denom = 1 - sum(r ** i for r in ratios)
        principal = None if abs(denom) < 1e-12 else (complex((N - i) * k / denom),)
        integer_poles.append(PoleSpec(complex(i), principal))
    isolated = _merge_isolated(tuple(integer_poles), ext_poles)

    rows, period = _scaling_rows(ratios, gz)
    source = None
    if period is None:
        dim = moran_dimension(ratios)

        def source(re_min, im_max):
            lo = max(re_min, -20.0) + 1e-3
            rect = Rectangle(lo, dim + 0.5, -im_max - 0.0137, im_max + 0.0137)
            return [PoleSpec(d.location, None if d.order > 1 else (complex(gz(d.location)) * d.residue,))
                    for d in find_moran_roots(ratios, rect)]

    boundary = interior_total
    if hull is not None:
        boundary += sum(ck * delta ** (N - k) for k, ck in enumerate(hull))
    return ZetaHandle(kind=ZetaKind.DISTANCE, func=func, ambient_dim=N, delta=delta,
                      languidity=LanguidityProfile(kappa=0.0, strong=True, B_constant=1.0),
                      name=name, vectorized=True, boundary_volume=boundary,
                      omega_volume=boundary if hull is not None else interior_total,
                      dimension=moran_dimension(ratios), rows=rows, isolated=isolated,
                      pole_source=source, period=period)


def steiner_tube_zeta(coeffs):
    """Tube zeta sum_k c_k delta^(s-k)/(s-k) of a set of positive reach"""
    c, delta = tuple(coeffs.c), coeffs.delta
    N = coeffs.ambient_dim

    def func(s):
        s = np.asarray(s, dtype=complex)
        return sum(ck * np.power(delta, s - k) / (s - k) for k, ck in enumerate(c) if ck)

    poles = tuple(PoleSpec(complex(k), (complex(ck),)) for k, ck in enumerate(c) if ck)
    volume = sum(ck * delta ** (N - k) for k, ck in enumerate(c))
    dim = max(k for k, ck in enumerate(c) if ck)
    return ZetaHandle(kind=ZetaKind.TUBE, func=func, ambient_dim=N, delta=delta,
                      languidity=LanguidityProfile(kappa=-1.0, strong=True, B_constant=1.0),
                      name="steiner", vectorized=True, boundary_volume=volume, omega_volume=volume,
                      dimension=float(dim), isolated=poles, validity_t_max=delta)


# Catalog closed forms

def reflex_corner_integral(s):
    """Z(s) = int_0^{pi/2} (cos phi + sin phi)^(-s) dphi"""
    s = complex(s)
    limit = 64 + int(4 * abs(s.imag))

    def part(fn):
        value, err = integrate.quad(
            lambda phi: fn(np.exp(-s * np.log(np.cos(phi) + np.sin(phi)))),
            0.0, math.pi / 2, limit=limit, epsabs=1e-13, epsrel=1e-11)
        if err > 1e-10 * max(1.0, abs(value)):
            raise QuadratureError(f"Z({s}) did not converge (error {err:.2e})")
        return value

    return complex(part(np.real), part(np.imag))


def _segment(entry):
    delta = entry.delta
    return dict(func=lambda s: 2 * np.power(delta, s) / s, vectorized=True,
                isolated=(PoleSpec(0j, (2.0 + 0j,)),), boundary_volume=2 * delta + 1)


def _cantor_string(entry):
    def residue(w):
        return np.power(2.0, 1 - w) / (w * np.power(3.0, w) * LOG3)

    row = PoleRow(complex(math.log(2) / LOG3), 2 * math.pi / LOG3, residue, "cantor")
    return dict(func=lambda s: np.power(2.0, 1 - s) / (s * (np.power(3.0, s) - 2)),
                vectorized=True, rows=(row,), isolated=(PoleSpec(0j, (-2 + 0j,)),),
                boundary_volume=1.0, period=row.period)


def _a_string(entry):
    a = entry.params["a"]

    def func(s):
        return 2 ** (1 - s) * zeta_Lb(a, 0.0, 0.0, s) / s

    dim = 1 / (a + 1)
    isolated = (PoleSpec(complex(dim), (complex(2 ** (1 - dim) * a ** dim),)),
                PoleSpec(0j, (complex(2 * riemann_zeta(0)),)))

    def source(re_min, im_max):
        if math.isinf(re_min):
            raise ParameterRangeError("infinitely many real poles; pass a screen")
        out = []
        m = 2
        while (1 - m) / (a + 1) > re_min:
            w, res = lb_pole(a, 0.0, 0.0, m)
            out.append(PoleSpec(complex(w), (complex(2 ** (1 - w) * res / w),)))
            m += 1
        return out

    return dict(func=func, isolated=isolated, pole_source=source, boundary_volume=1.0)


def _gasket(entry):
    delta = entry.delta
    c = 6 * SQRT3

    def func(s):
        inner = c * np.power(SQRT3, -s) * np.power(2.0, -s) / (s * (s - 1) * (np.power(2.0, s) - 3))
        return inner + 2 * math.pi * np.power(delta, s) / s + 3 * np.power(delta, s - 1) / (s - 1)

    def residue(w):
        return c * np.power(SQRT3, -w) * np.power(2.0, -w) / (w * (w - 1) * np.power(2.0, w) * LOG2)

    row = PoleRow(complex(math.log(3) / LOG2), 2 * math.pi / LOG2, residue, "gasket")
    isolated = (PoleSpec(0j, (complex(3 * SQRT3 + 2 * math.pi),)), PoleSpec(1 + 0j, (0j,)))
    return dict(func=func, vectorized=True, rows=(row,), isolated=isolated, period=row.period,
                boundary_volume=SQRT3 / 4 + 3 * delta + math.pi * delta ** 2)


def _carpet3(entry):
    delta = entry.delta

    def func(s):
        inner = 48 * np.power(2.0, -s) / (s * (s - 1) * (s - 2) * (np.power(3.0, s) - 26))
        return (inner + 4 * math.pi * np.power(delta, s) / s
                + 6 * math.pi * np.power(delta, s - 1) / (s - 1) + 6 * np.power(delta, s - 2) / (s - 2))

    def residue(w):
        return 48 * np.power(2.0, -w) / (w * (w - 1) * (w - 2) * np.power(3.0, w) * LOG3)

    row = PoleRow(complex(math.log(26) / LOG3), 2 * math.pi / LOG3, residue, "carpet")
    isolated = (PoleSpec(0j, (complex(4 * math.pi - 24 / 25),)),
                PoleSpec(1 + 0j, (complex(6 * math.pi + 24 / 23),)),
                PoleSpec(2 + 0j, (complex(96 / 17),)))
    return dict(func=func, vectorized=True, rows=(row,), isolated=isolated, period=row.period,
                boundary_volume=1 + 6 * delta + 3 * math.pi * delta ** 2 + 4 * math.pi / 3 * delta ** 3)


def published_half_square_zeta(s, delta=1.0):
    """Closed form of the 1/2-square distance zeta with the interior term at 1/16 scale"""
    s = np.asarray(s, dtype=complex)
    return (1.0 / (np.power(2.0, s) * s * (s - 1) * (np.power(2.0, s) - 2))
            + 4 * np.power(delta, s - 1) / (s - 1) + 2 * math.pi * np.power(delta, s) / s)


def _half_square(entry):
    delta = entry.delta
    published = entry.params.get("normalization", "geometric") == "published"
    scale = 1 / 16 if published else 1.0

    if published:
        func = lambda s: published_half_square_zeta(s, delta)
    else:
        def func(s):
            inner = np.power(2.0, 4 - s) / (s * (s - 1) * (np.power(2.0, s) - 2))
            return inner + 4 * np.power(delta, s - 1) / (s - 1) + 2 * math.pi * np.power(delta, s) / s

    def residue(w):
        return scale * np.power(2.0, 4 - w) / (w * (w - 1) * np.power(2.0, w) * LOG2)

    row = PoleRow(1 + 0j, 2 * math.pi / LOG2, residue, "half_square")
    double = (complex(scale * 4 / LOG2), complex(scale * (-4 / LOG2 - 6) + 4))
    isolated = (PoleSpec(0j, (complex(16 * scale + 2 * math.pi),)), PoleSpec(1 + 0j, double))
    return dict(func=func, vectorized=True, rows=(row,), isolated=isolated, period=row.period,
                boundary_volume=(scale if published else 1.0) + 4 * delta + math.pi * delta ** 2)


def _cantor_graph(entry):
    def residue(w):
        return 2 / (w * (w - 1) * np.power(3.0, w) * LOG3)

    row = PoleRow(complex(math.log(2) / LOG3), 2 * math.pi / LOG3, residue, "cantor_graph")
    return dict(func=lambda s: 2 / (s * (np.power(3.0, s) - 2) * (s - 1)), vectorized=True,
                rows=(row,), isolated=(PoleSpec(0j, (2 + 0j,)), PoleSpec(1 + 0j, (2 + 0j,))),
                period=row.period, boundary_volume=1 / 7)


def _third_square(entry):
    def func(s):
        return (2 / (s * (3.0 ** s - 2)) * (6 / (s - 1) + reflex_corner_integral(s))
                + 4 / (s - 1) + 2 * math.pi / s)

    def residue(w):
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        z = np.array([reflex_corner_integral(x) for x in w])
        return 2 / (w * np.power(3.0, w) * LOG3) * (6 / (w - 1) + z)

    row = PoleRow(complex(math.log(2) / LOG3), 2 * math.pi / LOG3, residue, "third_square")
    isolated = (PoleSpec(0j, (complex(12 + math.pi),)), PoleSpec(1 + 0j, (16 + 0j,)))
    return dict(func=func, rows=(row,), isolated=isolated, period=row.period,
                boundary_volume=1 + 4 + math.pi)


def _nest(entry):
    a = entry.params["a"]
    if a <= 0:
        raise ParameterRangeError("nest needs a > 0")
    dim = 2 / (a + 1)

    def func(s):
        return (2 ** (3 - s) * math.pi / (s - 1) * zeta_Lb(a, -a, 1.0, s)
                - 2 ** (2 - s) * math.pi / (s - 1) * zeta_Lb(a, 0.0, 0.0, s))

    if abs(a - 1) < 1e-12:
        isolated = (PoleSpec(1 + 0j),)
    else:
        res_d = 2 ** (3 - dim) * math.pi * a ** (dim - 1) / ((a + 1) * (dim - 1))
        res_1 = 4 * math.pi * riemann_zeta(a).real - 2 * math.pi
        isolated = (PoleSpec(complex(dim), (complex(res_d),)), PoleSpec(1 + 0j, (complex(res_1),)))

    def source(re_min, im_max):
        if math.isinf(re_min):
            raise ParameterRangeError("infinitely many real poles; pass a screen")
        out = []
        n = 0
        while (1 - n) / (a + 1) > re_min:
            w = (1 - n) / (a + 1)
            _, r1 = lb_pole(a, -a, 1.0, n + 1)
            _, r0 = lb_pole(a, 0.0, 0.0, n)
            res = (2 ** (3 - w) * math.pi * r1 - 2 ** (2 - w) * math.pi * r0) / (w - 1)
            out.append(PoleSpec(complex(w), (complex(res),)))
            n += 1
        return out

    return dict(func=func, isolated=isolated, pole_source=source, boundary_volume=math.pi)


def _chirp(entry):
    alpha, beta = entry.params["alpha"], entry.params["beta"]
    if not (-1 < alpha < 0 < beta):
        raise ParameterRangeError("chirp needs -1 < alpha < 0 < beta")
    a, b = 1 / beta, -alpha / beta
    dim = 1 + (b + 1) / (a + 1)

    def func(s):
        return 2 ** (2 - s) / (s - 1) * zeta_Lb(a, b, 1.0, s)

    _, lead = lb_pole(a, b, 1.0, 0)
    isolated = (PoleSpec(complex(dim), (complex(2 ** (2 - dim) * lead / (dim - 1)),)),
                PoleSpec(1 + 0j, (complex(2 * riemann_zeta(-b).real),)))

    def source(re_min, im_max):
        if math.isinf(re_min):
            raise ParameterRangeError("infinitely many real poles; pass a screen")
        out = []
        m = 1
        while 1 + (b + 1 - m) / (a + 1) > re_min:
            w, res = lb_pole(a, b, 1.0, m)
            if abs(w - 1) > 1e-12:
                out.append(PoleSpec(complex(w), (complex(2 ** (2 - w) * res / (w - 1)),)))
            m += 1
        return out

    if abs(b + 1 - round(b + 1)) < 1e-12 and round(b + 1) >= 1:
        isolated = (isolated[0], PoleSpec(1 + 0j))
    return dict(func=func, isolated=isolated, pole_source=source,
                boundary_volume=zeta_Lb(a, b, 1.0, 2.0).real)


def _ss_nest(entry):
    a = entry.params["a"]
    if not 0 < a < 1:
        raise ParameterRangeError("self-similar nest needs 0 < a < 1")
    la = math.log(1 / a)

    def func(s):
        return (np.power(2.0, 2 - s) * math.pi * (1 + a) * np.power(1 - a, s - 1)
                / ((s - 1) * (1 - np.power(a, s))) + 2 * math.pi / (s - 1) + 2 * math.pi / s)

    def residue(w):
        return np.power(2.0, 2 - w) * math.pi * (1 + a) * np.power(1 - a, w - 1) / ((w - 1) * la)

    row = PoleRow(0j, 2 * math.pi / la, residue, "ss_nest")
    isolated = (PoleSpec(1 + 0j, (complex(4 * math.pi / (1 - a)),)),
                PoleSpec(0j, (complex(2 * math.pi + 4 * math.pi * (1 + a) / ((1 - a) * math.log(a))),)))
    return dict(func=func, vectorized=True, rows=(row,), isolated=isolated, period=row.period,
                boundary_volume=4 * math.pi)


def _spray_entry(entry):
    p = entry.params
    spray = SelfSimilarSpray(tuple(p["ratios"]), tuple(p["kappa"]), p["generator_volume"],
                             p["inradius"], entry.ambient_dim)
    handle = spray_zeta(spray, hull=p.get("hull"), delta=entry.delta, name=entry.name)
    return dict(func=handle.func, vectorized=True, rows=handle.rows, isolated=handle.isolated,
                pole_source=handle.pole_source, period=handle.period,
                boundary_volume=handle.boundary_volume)


def _steiner(entry):
    coeffs = SteinerCoefficients(tuple(entry.params["c"]), entry.delta)
    dz = distance_from_tube(steiner_tube_zeta(coeffs))
    return dict(func=dz.func, vectorized=True, isolated=dz.isolated, removable=dz.removable,
                boundary_volume=dz.boundary_volume)


BUILDERS = {
    "segment": _segment,
    "cantor_string": _cantor_string,
    "a_string": _a_string,
    "gasket": _gasket,
    "carpet3": _carpet3,
    "half_square": _half_square,
    "cantor_graph": _cantor_graph,
    "third_square": _third_square,
    "nest": _nest,
    "chirp": _chirp,
    "ss_nest": _ss_nest,
    "spray": _spray_entry,
    "steiner": _steiner,
}


def catalog_zeta(entry):
    """Distance zeta handle of a catalog entry (closed form where one is known)"""
    family = entry.params.get("closed_form") or entry.params.get("family")
    builder = BUILDERS.get(family)
    if builder is None:
        raise UnknownEntryError(f"no zeta builder for family {family!r} ({entry.name})")
    parts = builder(entry)
    return ZetaHandle(kind=ZetaKind.DISTANCE, ambient_dim=entry.ambient_dim, delta=entry.delta,
                      languidity=entry.languidity, name=entry.name,
                      omega_volume=entry.omega_volume, dimension=entry.dimension,
                      validity_t_max=entry.validity_t_max, delta_min=entry.delta_min, **parts)
