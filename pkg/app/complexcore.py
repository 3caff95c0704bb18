"""Complex-plane machinery: Riemann zeta, Pochhammer symbols, contour
Laurent extraction and root finding for Dirichlet polynomials."""
import cmath
import math
import logging
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq
from scipy.special import bernoulli, loggamma

from .errors import (BoundaryPoleError, CountMismatchError, GammaPoleError,
                     ParameterRangeError, PoleError, QuadratureError)
from .models import ComplexDimension, LaurentExpansion, as_complex

logger = logging.getLogger(__name__)

EM_TERMS = 20
REFLECTION_BELOW = -2.0
CONTOUR_NODES = 256
CONTOUR_TOL = 1e-10
CONTOUR_DOUBLINGS = 6
ROOT_TOL = 1e-9


@lru_cache(maxsize=None)
def _em_coefficients(terms):
    """B_2j / (2j)! for j = 1..terms"""
    b = bernoulli(2 * terms)
    return tuple(b[2 * j] / math.factorial(2 * j) for j in range(1, terms + 1))


def _em_tail(z, n0, terms=EM_TERMS):
    # sum_{n >= n0} n^-z, Euler-Maclaurin at n0
    coeffs = _em_coefficients(terms)
    logn = math.log(n0)
    tail = cmath.exp((1 - z) * logn) / (z - 1) + 0.5 * cmath.exp(-z * logn)
    rising = z
    power = cmath.exp((-z - 1) * logn)
    for j, c in enumerate(coeffs, start=1):
        tail += c * rising * power
        rising *= (z + 2 * j - 1) * (z + 2 * j)
        power /= n0 * n0
    return tail


def hurwitz_tail(z, n0):
    """sum_{n >= n0} n^-z, continued analytically in z (z != 1)"""
    z = complex(z)
    if abs(z - 1) < 1e-12:
        raise PoleError("Hurwitz tail has a pole at z = 1")
    cutoff = max(n0, int(abs(z) / math.pi) + 20)
    head = 0j
    if cutoff > n0:
        n = np.arange(n0, cutoff, dtype=float)
        head = complex(np.exp(-z * np.log(n)).sum())
    return head + _em_tail(z, cutoff)


def _log_sin(z):
    if abs(z.imag) < 1.0:
        return cmath.log(cmath.sin(z))
    if z.imag < 0:
        return _log_sin(z.conjugate()).conjugate()
    # sin z = (i/2) e^{-iz} (1 - e^{2iz}), |e^{2iz}| < 1 here
    return cmath.log(0.5j) - 1j * z + cmath.log(1 - cmath.exp(2j * z))


def riemann_zeta(s):
    """Riemann zeta for complex s != 1.

    Euler-Maclaurin on Re s >= -2, functional equation (in logarithms)
    further left.
    """
    s = complex(s)
    if abs(s - 1) < 1e-12:
        raise PoleError("Riemann zeta has a pole at s = 1")
    if s.real >= REFLECTION_BELOW:
        n_cut = int(abs(s) / math.pi) + 20
        n = np.arange(1, n_cut, dtype=float)
        head = complex(np.exp(-s * np.log(n)).sum())
        return as_complex(head + _em_tail(s, n_cut))
    if s.imag == 0 and s.real == round(s.real) and int(round(s.real)) % 2 == 0:
        return 0j
    w = 1 - s
    log_value = (s * math.log(2) + (s - 1) * math.log(math.pi) + _log_sin(math.pi * s / 2)
                 + complex(loggamma(w)) + cmath.log(riemann_zeta(w)))
    return as_complex(cmath.exp(log_value))


def pochhammer(s, k):
    """(s)_k = Gamma(s+k)/Gamma(s); works elementwise on arrays"""
    s = np.asarray(s, dtype=complex)
    if k >= 0:
        out = np.ones_like(s)
        for j in range(k):
            out = out * (s + j)
    else:
        end = s + k
        hit = (np.abs(end.imag) == 0) & (end.real <= 0) & (end.real == np.round(end.real))
        if np.any(hit):
            raise GammaPoleError(f"Gamma(s+k) singular for s+k = {end[hit].ravel()[0]}")
        denom = np.ones_like(s)
        for j in range(k, 0):
            denom = denom * (s + j)
        out = 1 / denom
    return complex(out) if out.ndim == 0 else out


def evaluate_many(f, points):
    points = np.asarray(points, dtype=complex)
    many = getattr(f, "evaluate_many", None)
    if many is not None:
        return np.asarray(many(points), dtype=complex)
    return np.array([f(p) for p in points.ravel()], dtype=complex).reshape(points.shape)


def _circle_coefficients(f, omega, radius, nodes):
    theta = 2 * np.pi * np.arange(nodes) / nodes
    values = evaluate_many(f, omega + radius * np.exp(1j * theta))
    if not np.all(np.isfinite(values)):
        raise QuadratureError(f"non-finite samples on the circle about {omega}")
    return np.fft.fft(values) / nodes, float(np.max(np.abs(values)))


def default_radius(f, omega):
    hints = [p for p in (getattr(f, "known_poles_hint", None) or ()) if abs(p - omega) > 1e-9]
    period = getattr(f, "period", None)
    # a pole row repeats every period, so its neighbours are never farther
    radius = 0.4 * period if period else 0.25
    if not hints:
        return radius
    return min(radius if period else math.inf, 0.4 * min(abs(p - omega) for p in hints))


def contour_laurent(f, omega, radius=None, max_order=4, max_regular=32, tol=CONTOUR_TOL,
                    nodes=CONTOUR_NODES):
    """Laurent coefficients of f about omega from trapezoidal quadrature on a circle.

    Scaled coefficients c_q r^q are the FFT of the circle samples; the node
    count doubles until two passes agree to tol.
    """
    omega = complex(omega)
    if radius is None:
        radius = default_radius(f, omega)
    span = max(max_order, max_regular) + 1
    nodes = max(nodes, 4 * span)
    previous, scale = _circle_coefficients(f, omega, radius, nodes)
    for _ in range(CONTOUR_DOUBLINGS):
        nodes *= 2
        current, scale = _circle_coefficients(f, omega, radius, nodes)
        idx = list(range(-max_order, max_regular + 1))
        a_prev = np.array([previous[q % (nodes // 2)] for q in idx])
        a_cur = np.array([current[q % nodes] for q in idx])
        if np.max(np.abs(a_cur - a_prev)) <= tol * max(1.0, scale):
            break
        logger.debug("contour at %s: doubling to %d nodes", omega, nodes * 2)
        previous = current
    else:
        raise QuadratureError(f"contour quadrature about {omega} did not settle")

    floor = 1e3 * tol * max(1.0, scale)
    order = 0
    for m in range(max_order, 0, -1):
        if abs(current[(-m) % nodes]) > floor:
            order = m
            break
    principal = tuple(complex(current[(-q) % nodes]) / radius ** (-q) for q in range(order, 0, -1))
    regular = tuple(complex(current[q]) / radius ** q for q in range(max_regular + 1))
    return LaurentExpansion(omega, principal, regular, radius)


def gauss_legendre_panels(a, b, panels, nodes=16):
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b]"""
    x, w = leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


# Dirichlet polynomials 1 - sum r_j^s

def moran_function(ratios):
    logs = np.log(np.asarray(ratios, dtype=float))

    def f(s):
        s = np.asarray(s, dtype=complex)
        return 1 - np.exp(np.multiply.outer(s, logs)).sum(axis=-1)

    def fprime(s):
        s = np.asarray(s, dtype=complex)
        return -(np.exp(np.multiply.outer(s, logs)) * logs).sum(axis=-1)

    return f, fprime


def moran_dimension(ratios):
    """Real solution of sum r_j^s = 1"""
    ratios = list(ratios)
    if len(ratios) == 1:
        return 0.0
    g = lambda s: sum(r ** s for r in ratios) - 1
    hi = 1.0 + math.log(len(ratios)) / math.log(1 / max(ratios))
    return brentq(g, 0.0, hi, xtol=1e-15, rtol=1e-15)


def lattice_base(ratios, max_exponent=64, tol=1e-9):
    """(r, exponents) with r_j = r^{n_j}, or None for nonlattice ratio sets"""
    logs = [math.log(1 / r) for r in ratios]
    smallest = min(logs)
    for q in range(1, max_exponent + 1):
        unit = smallest / q
        exps = [x / unit for x in logs]
        ints = [round(e) for e in exps]
        if all(abs(e - n) < tol * max(1.0, e) for e, n in zip(exps, ints)):
            return math.exp(-unit), ints
    return None


def _path(rect, u):
    """Counterclockwise boundary point at perimeter parameter u in [0, 4]"""
    u = np.asarray(u, dtype=float)
    edge = np.minimum(np.floor(u), 3).astype(int)
    frac = u - edge
    corners = np.array([complex(rect.re_min, rect.im_min), complex(rect.re_max, rect.im_min),
                        complex(rect.re_max, rect.im_max), complex(rect.re_min, rect.im_max),
                        complex(rect.re_min, rect.im_min)])
    return corners[edge] + frac * (corners[edge + 1] - corners[edge])


def winding_count(f, rect, density=16.0, max_points=4_000_000):
    """Number of zeros of f inside rect (argument principle, adaptive phase unwrapping)"""
    per_edge = max(64, int(density * max(rect.width, rect.height)))
    u = np.linspace(0.0, 4.0, 4 * per_edge + 1)
    while True:
        values = f(_path(rect, u))
        if np.min(np.abs(values)) < 1e-13:
            raise BoundaryPoleError(f"zero on the boundary of {rect}")
        dphi = np.angle(values[1:] / values[:-1])
        bad = np.abs(dphi) > math.pi / 4
        if not bad.any():
            break
        if u.size > max_points:
            raise BoundaryPoleError(f"phase of f does not resolve on the boundary of {rect}")
        u = np.sort(np.concatenate([u, 0.5 * (u[:-1] + u[1:])[bad]]))
    total = dphi.sum() / (2 * math.pi)
    count = int(round(total))
    if abs(total - count) > 1e-3:
        raise QuadratureError(f"winding number {total} is not an integer")
    return count


def _boundary_moment(f, fprime, rect, nodes=48):
    """(1/2 pi i) contour integrals of f'/f and s f'/f over the rectangle"""
    x, w = leggauss(nodes)
    corners = [complex(rect.re_min, rect.im_min), complex(rect.re_max, rect.im_min),
               complex(rect.re_max, rect.im_max), complex(rect.re_min, rect.im_max)]
    m0 = m1 = 0j
    for a, b in zip(corners, corners[1:] + corners[:1]):
        s = 0.5 * (a + b) + 0.5 * (b - a) * x
        g = fprime(s) / f(s) * 0.5 * (b - a) * w
        m0 += g.sum()
        m1 += (s * g).sum()
    return m0 / (2j * math.pi), m1 / (2j * math.pi)


def newton_refine(f, fprime, s0, multiplicity=1, tol=1e-15, maxiter=60):
    s = complex(s0)
    for _ in range(maxiter):
        step = multiplicity * complex(f(s)) / complex(fprime(s))
        s -= step
        if abs(step) <= tol * max(1.0, abs(s)):
            return s
    return s


def _moran_dimension_record(ratios, omega, order, f, fprime, spacing):
    logs = np.log(np.asarray(ratios, dtype=float))
    if order == 1:
        residue = 1.0 / complex(fprime(omega))
        return ComplexDimension(omega, 1, (residue,))
    radius = 0.4 * min(spacing, 1.0)
    inverse = lambda s: 1.0 / f(s)
    expansion = contour_laurent(inverse, omega, radius=radius, max_order=order + 1, max_regular=4)
    logger.debug("multiple Moran root at %s (order %d, |log r| = %s)", omega, expansion.order, logs)
    return expansion.to_dimension()


def _lattice_roots(ratios, base, exponents, region, f, fprime):
    unit = math.log(1 / base)
    period = 2 * math.pi / unit
    degree = max(exponents)
    coeffs = np.zeros(degree + 1, dtype=complex)
    coeffs[degree] = 1.0
    for n in exponents:
        coeffs[degree - n] -= 1.0
    xs = np.roots(coeffs)
    # cluster repeated polynomial roots
    clusters = []
    for x in xs:
        for c in clusters:
            if abs(c[0] - x) < 1e-6 * max(1.0, abs(x)):
                c[1] += 1
                break
        else:
            clusters.append([x, 1])
    found = []
    for x, mult in clusters:
        s0 = -cmath.log(x) / unit
        kmin = math.ceil((region.im_min - s0.imag) / period) - 1
        kmax = math.floor((region.im_max - s0.imag) / period) + 1
        for k in range(kmin, kmax + 1):
            guess = complex(s0.real, s0.imag + k * period)
            if not region.contains(guess, tol=1e-6):
                continue
            omega = newton_refine(f, fprime, guess, multiplicity=mult)
            if region.contains(omega):
                found.append((omega, mult))
    return found, period


def _subdivide(f, fprime, rect, count, out, depth=0):
    if count == 0:
        return
    tiny = max(rect.width, rect.height) < 1e-7
    if count == 1 or tiny or depth > 60:
        m0, m1 = _boundary_moment(f, fprime, rect)
        seed = m1 / m0 if abs(m0) > 0.5 else rect.center
        omega = newton_refine(f, fprime, seed, multiplicity=count if tiny else 1)
        if not rect.contains(omega, tol=1e-8):
            omega = newton_refine(f, fprime, rect.center, multiplicity=count if tiny else 1)
        out.append((omega, count if tiny else 1))
        if count > 1 and not tiny:
            raise CountMismatchError(f"could not isolate {count} roots in {rect}")
        return
    children = rect.split()
    counts = [winding_count(f, child) for child in children]
    if sum(counts) != count:
        raise CountMismatchError(f"child counts {counts} do not add up to {count} in {rect}")
    for child, c in zip(children, counts):
        _subdivide(f, fprime, child, c, out, depth + 1)


def find_moran_roots(ratios, region, tol=ROOT_TOL):
    """All solutions of sum r_j^s = 1 in region, with principal parts of 1/(1 - sum r_j^s)"""
    ratios = [float(r) for r in ratios]
    if not ratios or any(not 0 < r < 1 for r in ratios):
        raise ParameterRangeError("ratios must be a nonempty list in (0, 1)")
    f, fprime = moran_function(ratios)
    density = max(16.0, 8.0 * sum(math.log(1 / r) for r in ratios))
    total = winding_count(f, region, density=density)
    lattice = lattice_base(ratios)
    if lattice is not None:
        raw, spacing = _lattice_roots(ratios, lattice[0], lattice[1], region, f, fprime)
    else:
        raw = []
        _subdivide(f, fprime, region, total, raw)
        spacing = 2 * math.pi / math.log(1 / min(ratios))

    roots = []
    for omega, mult in sorted(raw, key=lambda p: (p[0].imag, p[0].real)):
        if any(abs(omega - r[0]) < tol for r in roots):
            continue
        if region.boundary_distance(omega) < tol:
            raise BoundaryPoleError(f"root {omega} lies on the boundary of {region}")
        roots.append((omega, mult))

    if sum(m for _, m in roots) != total:
        raise CountMismatchError(
            f"refined roots ({sum(m for _, m in roots)}) != winding count ({total}) in {region}")
    logger.debug("found %d Moran roots in %s", len(roots), region)
    return [_moran_dimension_record(ratios, omega, mult, f, fprime, spacing) for omega, mult in roots]
