"""Numerical fractal zeta functions used to cross-check the closed forms.

Three independent routes: Monte Carlo over Omega for the distance zeta,
panel quadrature of t^(s-N-1) V(t) for the tube zeta, and truncated
vertical-line quadrature for Mellin inversion.
"""
import math
import logging

import numpy as np
from scipy import integrate

from .complexcore import gauss_legendre_panels
from .errors import NonintegrableError, ParameterRangeError, QuadratureError, ResidualError, ValidityError
from .models import McConfig, McResult, ZetaKind

logger = logging.getLogger(__name__)

HEAD_DECADES = 30
GL_NODES = 16
MAX_PHASE = 4.0
RESIDUAL_LIMIT = 1e-3


def _stratified_points(rng, region, count):
    """Jittered grid over the region's box: one point per cell, leftovers uniform"""
    dim = region.ambient_dim
    lo, hi = np.asarray(region.lo, dtype=float), np.asarray(region.hi, dtype=float)
    m = max(1, int(math.floor(count ** (1.0 / dim) + 1e-9)))
    cells = np.stack(np.meshgrid(*[np.arange(m)] * dim, indexing="ij"), axis=-1).reshape(-1, dim)
    unit = (cells + rng.random(cells.shape)) / m
    extra = count - len(unit)
    if extra > 0:
        unit = np.vstack([unit, rng.random((extra, dim))])
    return lo + unit * (hi - lo)


def mc_distance_zeta(recipe, region, s, cfg=None, depth=48, dimension=None):
    """Stratified Monte Carlo estimate of int_Omega d(x, A)^(s - N) dx.

    Every chunk draws from its own generator seeded with (seed, chunk index),
    so the estimate does not depend on evaluation order.
    """
    cfg = cfg or McConfig()
    s = complex(s)
    N = region.ambient_dim
    if dimension is not None:
        if s.real <= dimension:
            raise NonintegrableError(f"Re s = {s.real} is not above the dimension {dimension}")
        if s.real < dimension + 0.1:
            logger.warning("⚠️  Re s within 0.1 of the dimension; variance may be infinite")
    base, remainder = divmod(cfg.samples, cfg.chunk)
    estimates = []
    for i in range(cfg.chunk):
        rng = np.random.default_rng([cfg.seed, i])
        points = _stratified_points(rng, region, base + (1 if i < remainder else 0))
        inside = region.contains(points)
        d = recipe.distance(points[inside], depth)
        values = np.zeros(len(points), dtype=complex)
        hit = d > 0
        values[np.flatnonzero(inside)[hit]] = np.exp((s - N) * np.log(d[hit]))
        estimates.append(region.box_volume * values.mean())
    estimates = np.asarray(estimates)
    if cfg.chunk > 1:
        stderr_re = float(np.std(estimates.real, ddof=1) / math.sqrt(cfg.chunk))
        stderr_im = float(np.std(estimates.imag, ddof=1) / math.sqrt(cfg.chunk))
    else:
        stderr_re = stderr_im = float("nan")
    logger.debug("mc zeta at %s: %d chunks of %d samples", s, cfg.chunk, base)
    return McResult(complex(estimates.mean()), stderr_re, stderr_im, cfg.samples)


def _power_head(oracle, s, eps, N):
    """int_0^eps t^(s-N-1) V(t) dt from a power law fitted on [eps, 10 eps]"""
    v0, v1 = float(oracle(eps)), float(oracle(10 * eps))
    if v0 <= 0 or v1 <= 0:
        return 0j
    exponent = math.log10(v1 / v0)
    shift = s - N + exponent
    if shift.real <= 0:
        raise NonintegrableError(f"t^(s-N-1) V(t) is not integrable at 0 for s = {s}")
    return v0 * eps ** (s - N) / shift


def _panel_edges(oracle, eps, delta):
    edges = set(np.logspace(math.log10(eps), math.log10(delta), HEAD_DECADES + 1))
    kinks = oracle.breakpoints(eps, delta)
    if kinks is None:
        return None
    edges.update(kinks)
    return np.log(np.array(sorted(edges)))


def _panel_rule(u_edges, frequency, nodes):
    pts, wts = [], []
    for a, b in zip(u_edges[:-1], u_edges[1:]):
        panels = max(1, int(math.ceil(frequency * (b - a) / 2.0)))
        x, w = gauss_legendre_panels(a, b, panels, nodes)
        pts.append(x)
        wts.append(w)
    return np.concatenate(pts), np.concatenate(wts)


def numeric_tube_zeta(oracle, s, delta, N=None, dimension=None):
    """Tube zeta int_0^delta t^(s-N-1) V(t) dt by quadrature in log t"""
    s = complex(s)
    N = oracle.ambient_dim if N is None else N
    if delta <= 0:
        raise ParameterRangeError("delta must be positive")
    if dimension is not None and s.real <= dimension:
        raise NonintegrableError(f"Re s = {s.real} is not above the dimension {dimension}")
    eps = delta * 10.0 ** (-HEAD_DECADES)
    head = _power_head(oracle, s, eps, N)
    u_edges = _panel_edges(oracle, eps, delta)
    if u_edges is None:
        return head + _quad_tube_zeta(oracle, s, eps, delta, N)

    def rule(nodes):
        u, w = _panel_rule(u_edges, abs(s.imag), nodes)
        return np.sum(w * np.exp((s - N) * u) * oracle(np.exp(u)))

    coarse, fine = rule(GL_NODES), rule(GL_NODES + 8)
    if abs(fine - coarse) > 1e-10 * max(1.0, abs(fine)):
        raise QuadratureError(f"tube zeta panels did not settle at s = {s} ({abs(fine - coarse):.2e})")
    return complex(head + fine)


def _quad_tube_zeta(oracle, s, eps, delta, N):
    """Adaptive quadrature per decade for oracles with too many kinks to list"""
    total = 0j
    edges = np.log(np.logspace(math.log10(eps), math.log10(delta), HEAD_DECADES + 1))
    for a, b in zip(edges[:-1], edges[1:]):
        parts = []
        for part in (np.real, np.imag):
            f = lambda u: float(part(np.exp((s - N) * u) * oracle(math.exp(u))))
            value, err = integrate.quad(f, a, b, limit=400, epsabs=1e-14, epsrel=1e-11)
            if err > 1e-8 * max(1.0, abs(value)):
                raise QuadratureError(f"tube zeta quadrature stalled on [{math.exp(a):.3g}, {math.exp(b):.3g}]")
            parts.append(value)
        total += complex(parts[0], parts[1])
    return total


def mellin_invert_tube(z, t, c, T, nodes=GL_NODES):
    """Recover V(t) = (2 pi i)^-1 int_{c-iT}^{c+iT} t^(N-s) z(s) ds.

    Returns (value, imaginary residual).
    """
    N, D = z.ambient_dim, z.dimension
    if z.kind is ZetaKind.TUBE:
        if D is not None and not D < c < N + 1:
            raise ParameterRangeError(f"c = {c} must lie in ({D}, {N + 1})")
        if z.delta is not None and not 0 < t < z.delta:
            raise ValidityError(f"t = {t} outside (0, {z.delta})")
    elif z.kind is ZetaKind.MELLIN:
        if D is not None and not D < c < N:
            raise ParameterRangeError(f"c = {c} must lie in ({D}, {N})")
    else:
        raise ParameterRangeError(f"cannot invert a {z.kind.value} zeta function")
    if t <= 0:
        raise ValidityError("t must be positive")
    rate = max(abs(math.log(t)), 1.0)
    if z.delta is not None:
        rate = max(rate, abs(math.log(t / z.delta)))
    width = MAX_PHASE / rate
    if z.period:
        width = min(width, z.period / 2)
    panels = int(math.ceil(2 * T / width))
    y, w = gauss_legendre_panels(-T, T, panels, nodes)
    s = c + 1j * y
    values = z.evaluate_many(s)
    integral = np.sum(w * np.exp((N - s) * math.log(t)) * values) / (2 * math.pi)
    value, residual = float(integral.real), float(integral.imag)
    if abs(residual) > RESIDUAL_LIMIT * abs(value):
        raise ResidualError(f"imaginary residual {residual:.3g} against value {value:.6g}")
    logger.debug("mellin inversion at t=%s: %d panels, residual %.2e", t, panels, residual)
    return value, residual
