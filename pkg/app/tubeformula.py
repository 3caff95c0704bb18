"""Pointwise fractal tube formulas.

Complex dimensions come from the analytic pole data of a ZetaHandle (rows,
isolated poles, pole sources) and from contour extraction where a principal
part is not known in closed form. Each pole contributes the residue of
t^(N-s+k) z(s) / weight(s); the weight is (N-s)_{k+1} for distance-type
handles and (N-s+1)_k for tube-type handles.
"""
import math
import logging
from collections import defaultdict

import numpy as np

from .complexcore import contour_laurent, gauss_legendre_panels
from .errors import (InsufficientDimsError, LanguidityError, MismatchError, ParameterRangeError,
                     PoleError, ResidualError, ScreenPoleError, ValidityError)
from .models import (Classification, ComplexDimension, DimensionReport, FractalString, LengthRule,
                     Measurability, TubeExpansion, TubeTerm, ValidationReport, ZetaKind)

logger = logging.getLogger(__name__)

DEFAULT_IM_MAX = 50.0
CANCEL_TOL = 1e-8
SCREEN_TOL = 1e-6
REALNESS_TOL = 1e-9
OSCILLATION_SAMPLES = 4096
TAIL_SAFETY = 1.25

DISTANCE_LIKE = (ZetaKind.DISTANCE,)
TUBE_LIKE = (ZetaKind.TUBE, ZetaKind.SHELL, ZetaKind.MELLIN)


def _weight_offsets(kind, level):
    """j with weight(s) = prod_j (N - s + j)"""
    if kind in DISTANCE_LIKE:
        return range(0, level + 1)
    if kind in TUBE_LIKE:
        return range(1, level + 1)
    raise MismatchError(f"no tube formula for a {kind.value} zeta function")


def kernel(kind, N, level):
    """s, t -> t^(N-s+k) / weight(s)"""
    offsets = list(_weight_offsets(kind, level))

    def k(s, t):
        s = np.asarray(s, dtype=complex)
        weight = np.ones_like(s)
        for j in offsets:
            weight = weight * (N - s + j)
        return np.exp((N - s + level) * math.log(t)) / weight

    return k


def _inverse_weight_series(kind, N, level, omega, order):
    """Taylor coefficients in u = s - omega of 1/weight(s), up to u^(order-1)"""
    series = np.zeros(order, dtype=complex)
    series[0] = 1.0
    for j in _weight_offsets(kind, level):
        a = N - omega + j
        if abs(a) < 1e-12:
            raise PoleError(f"weight vanishes at omega = {omega} (level {level})")
        factor = np.array([a ** -(n + 1) for n in range(order)], dtype=complex)
        series = np.convolve(series, factor)[:order]
    return series


def residue_term(z, dim, level=0, kind=None):
    """Residue of the level-k kernel times z at dim, as TubeTerms.

    t^(N-s+k) = t^(N-omega+k) exp(u log 1/t), so log powers up to order-1
    appear for a pole of that order.
    """
    kind = z.kind if kind is None else kind
    N, omega, m = z.ambient_dim, dim.location, dim.order
    if kind in DISTANCE_LIKE and abs(omega - N) < 1e-12:
        raise PoleError(f"s = N is excluded from distance-type expansions ({z.name})")
    w = _inverse_weight_series(kind, N, level, omega, m)
    terms = []
    for j in range(m):
        coefficient = sum(dim.coefficient(q) * w[q - 1 - j] for q in range(j + 1, m + 1)) / math.factorial(j)
        if coefficient != 0:
            terms.append(TubeTerm(omega, j, complex(coefficient), level, dim.row))
    return terms


def _check_screen(z, window, im_max):
    near = z.poles(window.screen_re - 0.01, im_max)
    for spec in near:
        if abs(spec.location.real - window.screen_re) < SCREEN_TOL:
            raise ScreenPoleError(f"screen Re s = {window.screen_re} passes through {spec.location}")


def complex_dimensions(z, window=None, im_max=None, contour_tol=None):
    """Visible complex dimensions of z, sorted by (Im, Re)"""
    re_min = -math.inf if window is None else window.screen_re
    if im_max is None:
        im_max = window.im_cut if window is not None and window.im_cut else DEFAULT_IM_MAX
    if window is not None:
        if z.dimension is not None and window.screen_re >= z.dimension:
            raise ParameterRangeError(f"screen {window.screen_re} must lie left of D = {z.dimension}")
        _check_screen(z, window, im_max)
    dims = []
    for spec in z.poles(re_min, im_max):
        if spec.principal is not None:
            principal = tuple(spec.principal)
        else:
            kwargs = {} if contour_tol is None else {"tol": contour_tol}
            expansion = contour_laurent(z, spec.location, radius=spec.radius, **kwargs)
            principal = expansion.principal
        floor = CANCEL_TOL if spec.principal is None else 1e-15
        while principal and abs(principal[0]) < floor:
            principal = principal[1:]
        if not principal:
            logger.info("pole at %s cancels for %s; removed", spec.location, z.name)
            continue
        dims.append(ComplexDimension(spec.location, len(principal), principal, spec.row))
    return sorted(dims, key=lambda d: (d.location.imag, d.location.real))


def _rows_for(z, K):
    if K is None or not z.period:
        return None
    return (K + 0.5) * z.period


def tube_expansion(z, window=None, level=0, K=None, t_max=None):
    """Sum of residue terms over the visible complex dimensions.

    Without a window the handle must be strongly languid and the expansion is
    exact on its validity interval; with a window the error is O(t^(N-sigma+k)).
    """
    if level < 0:
        raise ParameterRangeError("distributional levels k < 0 are not supported")
    profile = z.languidity
    if window is None and not profile.strong:
        raise LanguidityError(f"{z.name} is not strongly languid; pass a window")
    N = z.ambient_dim
    im_max = _rows_for(z, K)
    if window is not None and window.im_cut:
        im_max = window.im_cut
    dims = complex_dimensions(z, window, im_max=im_max)
    terms = [term for dim in dims for term in residue_term(z, dim, level)]

    if window is None:
        if t_max is None and z.validity_t_max is not None:
            t_max = z.validity_t_max
            logger.info("validity interval of %s taken from the entry: (0, %g)", z.name, t_max)
        if t_max is None:
            lam, B = profile.scale_lambda, profile.B_constant
            t_max = min(1.0, z.delta or 1.0, 1.0 / B) / lam
        return TubeExpansion(N, level, terms, t_max, exact=True, name=z.name)

    sigma = window.screen_re
    kappa = profile.kappa_at(sigma)
    pointwise = level > kappa
    if not pointwise:
        logger.warning("⚠️  %s: level %d <= kappa(%g) = %g; window expansion is not pointwise",
                       z.name, level, sigma, kappa)
    return TubeExpansion(N, level, terms, t_max or z.delta, exact=False, error_exponent=N - sigma + level,
                         pointwise=pointwise, name=z.name)


def _term_values(terms, N, t):
    if not terms:
        return np.zeros(0, dtype=complex)
    omega = np.array([term.omega for term in terms])
    coef = np.array([term.coefficient for term in terms])
    level = np.array([term.level for term in terms])
    power = np.array([term.log_power for term in terms])
    L = -math.log(t)
    return coef * np.exp((N - omega + level) * math.log(t)) * L ** power


def tail_bound(exp, t, K):
    """Bound on the dropped rows |row| > K from the coefficient envelope on (K/2, K]"""
    if K is None:
        return 0.0
    L = max(1.0, -math.log(t))
    envelope = defaultdict(float)
    for term in exp.terms:
        if term.row is None or not K / 2 < abs(term.row) <= K:
            continue
        key = round(term.omega.real, 8)
        envelope[key] = max(envelope[key], abs(term.coefficient) * term.row ** 2 * L ** term.log_power)
    return TAIL_SAFETY * sum(2 * c / K * t ** (exp.ambient_dim - re + exp.level)
                             for re, c in envelope.items())


def evaluate_expansion(exp, t, K=None):
    """(value, tail bound) of the symmetric partial sum over rows |row| <= K"""
    if not 0 < t <= exp.validity_t_max:
        raise ValidityError(f"t = {t} outside (0, {exp.validity_t_max}] for {exp.name}")
    terms = exp.terms if K is None else [term for term in exp.terms if term.row is None or abs(term.row) <= K]
    total = complex(np.sum(_term_values(terms, exp.ambient_dim, t)))
    if abs(total.imag) > REALNESS_TOL * max(1.0, abs(total.real)):
        raise ResidualError(f"{exp.name}: imaginary part {total.imag:.3g} at t = {t}")
    return total.real, tail_bound(exp, t, K)


def differentiate_expansion(exp):
    """Termwise d/dt, taking a level-k expansion to level k-1"""
    if exp.level < 1:
        raise ParameterRangeError("cannot differentiate a level-0 expansion")
    N, k = exp.ambient_dim, exp.level
    terms = []
    for term in exp.terms:
        e = N - term.omega + k
        terms.append(TubeTerm(term.omega, term.log_power, term.coefficient * e, k - 1, term.row))
        if term.log_power:
            terms.append(TubeTerm(term.omega, term.log_power - 1, -term.log_power * term.coefficient,
                                  k - 1, term.row))
    return TubeExpansion(N, k - 1, terms, exp.validity_t_max, exp.exact,
                         None if exp.error_exponent is None else exp.error_exponent - 1,
                         exp.pointwise, exp.name)


def verify_residue_term(z, dim, level, t, radius=None):
    """(symbolic, contour) values of the residue term at t"""
    symbolic = complex(np.sum(_term_values(residue_term(z, dim, level), z.ambient_dim, t)))
    K = kernel(z.kind, z.ambient_dim, level)

    class _Integrand:
        known_poles_hint = z.known_poles_hint
        period = z.period

        def __call__(self, s):
            return complex(K(s, t) * z(s))

        def evaluate_many(self, points):
            return K(points, t) * z.evaluate_many(points)

    expansion = contour_laurent(_Integrand(), dim.location, radius=radius, max_order=dim.order + 1)
    return symbolic, expansion.residue


def _line_rule(t, z, T, nodes=16):
    rate = max(abs(math.log(t)), 1.0)
    if z.delta:
        rate = max(rate, abs(math.log(t / z.delta)))
    width = 4.0 / rate
    if z.period:
        width = min(width, z.period / 2)
    return gauss_legendre_panels(-T, T, int(math.ceil(2 * T / width)), nodes)


def screen_error_term(z, window, t, k, T):
    """Error term of a window expansion: the kernel integral along Re s = sigma.

    Returns (value, tail bound beyond |Im s| = T, a-priori bound).
    """
    sigma = window.screen_re
    kappa = z.languidity.kappa_at(sigma)
    if k <= kappa:
        raise LanguidityError(f"level {k} does not exceed kappa({sigma}) = {kappa}")
    N = z.ambient_dim
    _check_screen(z, window, T)
    K = kernel(z.kind, N, k)
    y, w = _line_rule(t, z, T)
    s = sigma + 1j * y
    zs = z.evaluate_many(s)
    integrand = K(s, t) * zs
    value = float(np.sum(w * integrand).real / (2 * math.pi))

    # |z(sigma + iy)| <= C |y|^kappa on the outer half of the line
    outer = np.abs(y) >= T / 2
    C = float(np.max(np.abs(zs[outer]) * np.abs(y[outer]) ** (-kappa))) if outer.any() else 0.0
    decay = k + 1 if z.kind in DISTANCE_LIKE else k
    excess = decay - kappa
    scale = t ** (N - sigma + k)
    tail = 2 * C * scale * T ** (1 - excess) / ((excess - 1) * 2 * math.pi) if excess > 1 else math.inf
    apriori = float(np.sum(w * np.abs(integrand)) / (2 * math.pi)) + tail
    return value, tail, apriori


def _content_weight(z, omega):
    """Leading coefficient of t^(N-omega) per unit Laurent coefficient"""
    if z.kind in DISTANCE_LIKE:
        return 1.0 / (z.ambient_dim - omega)
    return 1.0


def oscillation_extrema(z, dims, samples=OSCILLATION_SAMPLES):
    """(min, max) over one period of the periodic factor of V(t) / t^(N-D)"""
    if not dims:
        raise InsufficientDimsError("no dimensions on the critical line")
    D = max(d.location.real for d in dims)
    critical = [d for d in dims if abs(d.location.real - D) < 1e-9]
    freqs = sorted(abs(d.location.imag) for d in critical if not d.is_real)
    if not freqs:
        value = sum(d.residue * _content_weight(z, d.location) for d in critical).real
        return value, value
    period_x = 2 * math.pi / freqs[0]
    x = np.linspace(0.0, period_x, samples, endpoint=False)
    G = np.zeros(samples, dtype=complex)
    for d in critical:
        G += d.residue * _content_weight(z, d.location) * np.exp(1j * d.location.imag * x)
    return float(G.real.min()), float(G.real.max())


def minkowski_report(z, dims):
    """Minkowski dimension, content and fractality class from the complex dimensions"""
    if not dims:
        raise InsufficientDimsError("empty dimension list")
    D = max(d.location.real for d in dims)
    if z.dimension is not None and D < z.dimension - 1e-9:
        raise InsufficientDimsError(f"dimensions stop at Re = {D}, below D = {z.dimension}")
    N = z.ambient_dim
    critical = [d for d in dims if abs(d.location.real - D) < 1e-9]
    nonreal = [d for d in dims if not d.is_real]
    notes = []

    real_d = next((d for d in critical if d.is_real), None)
    content = gauge = None
    if real_d is not None and real_d.order >= 2:
        measurable = Measurability.DEGENERATE_GAUGE
        gauge = (real_d.coefficient(2) * _content_weight(z, real_d.location)).real
        lower = upper = math.inf
        notes.append(f"pole of order {real_d.order} at D; gauge log(1/t)")
    elif any(not d.is_real for d in critical):
        measurable = Measurability.NONMEASURABLE_OSCILLATORY
        lower, upper = oscillation_extrema(z, critical)
    else:
        measurable = Measurability.MEASURABLE
        content = (real_d.residue * _content_weight(z, real_d.location)).real
        lower = upper = content

    off_line = [d.location.real for d in nonreal if abs(d.location.real - D) >= 1e-9]
    if any(abs(d.location.real - D) < 1e-9 for d in nonreal):
        classification, sub_d = Classification.CRITICAL, D
    elif off_line:
        classification, sub_d = Classification.STRICTLY_SUBCRITICAL, max(off_line)
    else:
        classification, sub_d = Classification.NONFRACTAL, None
    if N - D < 1e-12:
        notes.append("D = N")
    return DimensionReport(D, lower, upper, measurable, classification, content=content,
                           gauge_content=gauge, subcritical_d=sub_d, subcriticality_index=sub_d,
                           notes=notes)


def content_regression(oracle, t_grid, exponent, log_power=0, extra_exponents=()):
    """Least-squares fit of V(t) on t^e log^m(1/t), ..., t^e plus extra powers.

    Returns the coefficients, leading one first. Rows are weighted by 1/V so
    every sample counts in relative terms.
    """
    t = np.asarray(t_grid, dtype=float)
    L = -np.log(t)
    columns = [t ** exponent * L ** m for m in range(log_power, -1, -1)]
    columns += [t ** e for e in extra_exponents]
    A = np.column_stack(columns)
    v = np.asarray(oracle(t), dtype=float)
    weight = 1.0 / np.where(v > 0, v, 1.0)
    coef, *_ = np.linalg.lstsq(A * weight[:, None], v * weight, rcond=None)
    return coef


def scale_string(string, lam):
    """The string with every length multiplied by lam"""
    if string.length_rule is LengthRule.EXPLICIT:
        return FractalString.explicit([lam * l for l in string.lengths])
    if string.length_rule in (LengthRule.CANTOR, LengthRule.SELF_SIMILAR):
        ratios, _ = string.self_similar_data()
        return FractalString.self_similar(ratios, lam * string.total_length)
    raise ParameterRangeError("only self-similar and explicit strings can be rescaled")


def scaling_check(string, k, t, lam):
    """(V_lam^[k](t), lam^(1+k) V^[k](t/lam)) for a string and its rescaling"""
    from .geometry import StringOracle

    scaled = StringOracle(scale_string(string, lam)).primitive(k, t)
    reference = lam ** (1 + k) * StringOracle(string).primitive(k, t / lam)
    return float(scaled), float(reference)


def validate(exp, oracle, t_grid, K=None, tolerance=1e-3, relative=False, name=None):
    """Compare an expansion with the oracle primitive of the same level on a t grid"""
    report = ValidationReport(entry=name or exp.name, t=[], formula=[], oracle=[], tail_bound=[],
                              tolerance=tolerance, relative=relative)
    bound = getattr(oracle, "error_bound", None)
    series = oracle.sample(exp.level, sorted(float(t) for t in t_grid))
    for t, reference in series.samples:
        value, tail = evaluate_expansion(exp, t, K)
        report.t.append(t)
        report.formula.append(value)
        report.oracle.append(reference)
        report.tail_bound.append(tail)
        err = abs(value - reference)
        if relative:
            rel = err / abs(reference) if reference else err
            if rel > tolerance:
                report.errors.append(f"t={t:.6g}: relative error {rel:.3g} > {tolerance:g}")
        elif err > tolerance + tail:
            report.errors.append(f"t={t:.6g}: error {err:.3g} > {tolerance:g} + tail {tail:.3g}")
        if bound is not None:
            report.notes.setdefault("oracle_bound", []).append(float(bound(float(t))))
    return report
