import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ParameterRangeError, PoleError

SPLIT_FRACTION = 0.4937


def as_complex(value):
    """Coerce to a finite Python complex; NaN or infinity is a pole hit"""
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise PoleError(f"non-finite value {z!r}")
    return z


class ZetaKind(enum.Enum):
    """Enum for the flavours of fractal zeta function"""
    DISTANCE = "distance"
    TUBE = "tube"
    SHELL = "shell"
    MELLIN = "mellin"
    GEOMETRIC_STRING = "geometric_string"
    SCALING = "scaling"


class RfdKind(enum.Enum):
    """Enum for catalog entry geometry families"""
    FRACTAL_STRING = "fractal_string"
    SELF_SIMILAR_SPRAY = "self_similar_spray"
    PLANAR_SET = "planar_set"
    STEINER_SET = "steiner_set"


class LengthRule(enum.Enum):
    """Enum for the ways a fractal string lists its lengths"""
    CANTOR = "cantor"
    A_STRING = "a_string"
    SELF_SIMILAR = "self_similar"
    EXPLICIT = "explicit"


class Measurability(enum.Enum):
    """Enum for the Minkowski measurability verdict"""
    MEASURABLE = "measurable"
    NONMEASURABLE_OSCILLATORY = "nonmeasurable_oscillatory"
    DEGENERATE_GAUGE = "degenerate_gauge"


class Classification(enum.Enum):
    """Enum for fractality classes"""
    CRITICAL = "critical"
    STRICTLY_SUBCRITICAL = "strictly_subcritical"
    NONFRACTAL = "nonfractal"


@dataclass(frozen=True)
class Rectangle:
    """Axis-parallel search region in the complex plane"""
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ParameterRangeError(f"degenerate rectangle {self}")

    @property
    def width(self):
        return self.re_max - self.re_min

    @property
    def height(self):
        return self.im_max - self.im_min

    @property
    def center(self):
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def contains(self, s, tol=0.0):
        return (self.re_min - tol <= s.real <= self.re_max + tol
                and self.im_min - tol <= s.imag <= self.im_max + tol)

    def boundary_distance(self, s):
        return min(abs(s.real - self.re_min), abs(s.real - self.re_max),
                   abs(s.imag - self.im_min), abs(s.imag - self.im_max))

    def split(self):
        """Quarter the rectangle (halve along the long side when elongated).

        Cuts sit slightly off center so real roots and conjugate pairs of a
        symmetric rectangle never fall on a cut.
        """
        mr = self.re_min + SPLIT_FRACTION * self.width
        mi = self.im_min + SPLIT_FRACTION * self.height
        if self.height > 4 * self.width:
            return [Rectangle(self.re_min, self.re_max, self.im_min, mi),
                    Rectangle(self.re_min, self.re_max, mi, self.im_max)]
        if self.width > 4 * self.height:
            return [Rectangle(self.re_min, mr, self.im_min, self.im_max),
                    Rectangle(mr, self.re_max, self.im_min, self.im_max)]
        return [Rectangle(self.re_min, mr, self.im_min, mi),
                Rectangle(mr, self.re_max, self.im_min, mi),
                Rectangle(self.re_min, mr, mi, self.im_max),
                Rectangle(mr, self.re_max, mi, self.im_max)]


@dataclass(frozen=True)
class ComplexDimension:
    """A pole omega with its order and principal part c_{-m}, ..., c_{-1}"""
    location: complex
    order: int
    principal_part: tuple
    row: Optional[int] = None

    def __post_init__(self):
        if self.order < 1:
            raise ParameterRangeError(f"pole order must be >= 1, got {self.order}")
        if len(self.principal_part) != self.order:
            raise ParameterRangeError("principal part length must equal the pole order")
        object.__setattr__(self, "location", as_complex(self.location))
        object.__setattr__(self, "principal_part", tuple(as_complex(c) for c in self.principal_part))
        if self.principal_part[0] == 0:
            raise ParameterRangeError(f"leading Laurent coefficient vanishes at {self.location}")

    @property
    def residue(self):
        return self.principal_part[-1]

    @property
    def is_real(self):
        return abs(self.location.imag) < 1e-12

    def coefficient(self, q):
        """Laurent coefficient c_{-q}, q = 1..order (zero beyond)"""
        if q < 1 or q > self.order:
            return 0j
        return self.principal_part[self.order - q]

    def conjugate(self):
        return ComplexDimension(self.location.conjugate(), self.order,
                                tuple(c.conjugate() for c in self.principal_part),
                                None if self.row is None else -self.row)


@dataclass(frozen=True)
class LaurentExpansion:
    """Laurent coefficients about a center: principal c_{-m}..c_{-1} and regular c_0..c_M"""
    center: complex
    principal: tuple
    regular: tuple
    radius: float

    @property
    def order(self):
        return len(self.principal)

    @property
    def residue(self):
        return self.principal[-1] if self.principal else 0j

    def evaluate(self, s):
        u = complex(s) - self.center
        value = sum(c * u ** j for j, c in enumerate(self.regular))
        for q, c in enumerate(reversed(self.principal), start=1):
            value += c * u ** (-q)
        return value

    def to_dimension(self, row=None):
        if not self.principal:
            raise PoleError(f"no pole at {self.center}")
        return ComplexDimension(self.center, self.order, self.principal, row)


@dataclass(frozen=True)
class LanguidityProfile:
    """Growth exponent and strong-languidity data of a zeta function.

    kappa is the exponent on screens right of kappa_pivot; further left it
    grows by kappa_slope per unit of real part.
    """
    kappa: float
    strong: bool = False
    scale_lambda: float = 1.0
    B_constant: Optional[float] = None
    kappa_slope: float = 0.0
    kappa_pivot: float = 0.0

    def __post_init__(self):
        if self.strong and self.B_constant is None:
            raise ParameterRangeError("strong languidity needs a B constant")
        if self.scale_lambda <= 0:
            raise ParameterRangeError("scale lambda must be positive")

    def kappa_at(self, sigma):
        return self.kappa + self.kappa_slope * max(self.kappa_pivot - sigma, 0.0)


@dataclass(frozen=True)
class PoleRow:
    """Lattice row base + i*period*k with a vectorized residue formula"""
    base: complex
    period: float
    residue: Callable
    label: str = ""

    def locations(self, im_max):
        kmax = int(math.floor(im_max / self.period + 1e-9))
        ks = np.arange(-kmax, kmax + 1)
        return ks, self.base + 1j * self.period * ks


@dataclass(frozen=True)
class PoleSpec:
    """A pole candidate; principal part None means 'extract by contour'"""
    location: complex
    principal: Optional[tuple] = None
    radius: Optional[float] = None
    row: Optional[int] = None


@dataclass(frozen=True)
class SteinerCoefficients:
    """Steiner-type tube polynomial V(t) = sum c_k t^(N-k) for t < reach"""
    c: tuple
    delta: float

    def __post_init__(self):
        if not any(abs(ck) > 0 for ck in self.c):
            raise ParameterRangeError("at least one Steiner coefficient must be nonzero")
        if self.delta <= 0:
            raise ParameterRangeError("delta must be positive")

    @property
    def ambient_dim(self):
        return len(self.c) - 1


@dataclass(frozen=True)
class FractalString:
    """Bounded fractal string given by a length rule"""
    length_rule: LengthRule
    total_length: float = 1.0
    a: Optional[float] = None
    ratios: tuple = ()
    gap: Optional[float] = None
    lengths: tuple = ()

    def __post_init__(self):
        if self.length_rule is LengthRule.A_STRING and not (self.a and self.a > 0):
            raise ParameterRangeError("a-string needs a > 0")
        if self.length_rule is LengthRule.SELF_SIMILAR:
            if not self.ratios or any(not 0 < r < 1 for r in self.ratios) or sum(self.ratios) >= 1:
                raise ParameterRangeError("self-similar string needs ratios in (0,1) with sum < 1")
        if self.length_rule is LengthRule.EXPLICIT and any(l <= 0 for l in self.lengths):
            raise ParameterRangeError("explicit lengths must be positive")

    @classmethod
    def cantor(cls):
        return cls(LengthRule.CANTOR, 1.0, ratios=(1 / 3, 1 / 3), gap=1 / 3)

    @classmethod
    def a_string(cls, a):
        return cls(LengthRule.A_STRING, 1.0, a=a)

    @classmethod
    def self_similar(cls, ratios, total_length=1.0):
        ratios = tuple(ratios)
        return cls(LengthRule.SELF_SIMILAR, total_length, ratios=ratios,
                   gap=total_length * (1 - sum(ratios)))

    @classmethod
    def explicit(cls, lengths):
        lengths = tuple(sorted(lengths, reverse=True))
        return cls(LengthRule.EXPLICIT, float(sum(lengths)), lengths=lengths)

    def self_similar_data(self):
        """(ratios, gap) for the Cantor and self-similar rules"""
        if self.length_rule is LengthRule.CANTOR:
            return (1 / 3, 1 / 3), 1 / 3
        return self.ratios, self.gap


@dataclass(frozen=True)
class SelfSimilarSpray:
    """Self-similar spray with a monophase generator.

    kappa holds the inner tube coefficients kappa_0..kappa_{N-1} of the
    generator, V_G(t) = sum kappa_i t^(N-i) for t < inradius.
    """
    ratios: tuple
    kappa: tuple
    generator_volume: float
    inradius: float
    ambient_dim: int

    def __post_init__(self):
        if not self.ratios or any(not 0 < r < 1 for r in self.ratios):
            raise ParameterRangeError("spray ratios must lie in (0,1)")
        if sum(r ** self.ambient_dim for r in self.ratios) >= 1:
            raise ParameterRangeError("spray needs sum of r_j^N < 1")
        if self.inradius <= 0:
            raise ParameterRangeError("inradius must be positive")
        if len(self.kappa) != self.ambient_dim:
            raise ParameterRangeError("need kappa_0..kappa_{N-1}")

    @property
    def kappa_full(self):
        """kappa_0..kappa_N with kappa_N = -|G|"""
        return tuple(self.kappa) + (-self.generator_volume,)

    def generator_tube(self, tau):
        tau = np.asarray(tau, dtype=float)
        N = self.ambient_dim
        poly = sum(k * tau ** (N - i) for i, k in enumerate(self.kappa))
        return np.where(tau < self.inradius, poly, self.generator_volume)


@dataclass(frozen=True)
class RfdDescriptor:
    """Catalog entry: an RFD with its exact parameters and metadata"""
    name: str
    ambient_dim: int
    kind: RfdKind
    params: dict
    delta: float
    omega_volume: float
    dimension: float
    languidity: LanguidityProfile
    description: str = ""
    validity_t_max: Optional[float] = None
    delta_min: Optional[float] = None
    period: Optional[float] = None
    tolerance: float = 1e-3

    def __post_init__(self):
        if self.omega_volume <= 0:
            raise ParameterRangeError(f"{self.name}: omega volume must be positive")
        if self.delta <= 0:
            raise ParameterRangeError(f"{self.name}: delta must be positive")

    def summary(self):
        lang = self.languidity
        return {
            "name": self.name,
            "N": self.ambient_dim,
            "kind": self.kind.value,
            "delta": self.delta,
            "D": self.dimension,
            "kappa": lang.kappa,
            "strong": lang.strong,
            "lambda": lang.scale_lambda,
        }


@dataclass(frozen=True)
class TubeSampleSeries:
    """Sampled tube function (or its k-th primitive)"""
    level: int
    samples: tuple

    def __post_init__(self):
        ts = [t for t, _ in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ParameterRangeError("sample abscissae must increase strictly")
        if self.level == 0:
            vals = [v for _, v in self.samples]
            if any(b < a - 1e-12 for a, b in zip(vals, vals[1:])):
                raise ParameterRangeError("level-0 tube samples must be nondecreasing")


@dataclass(frozen=True)
class Window:
    """Vertical-line screen Re s = screen_re with optional |Im| cut"""
    screen_re: float
    im_cut: Optional[float] = None


@dataclass(frozen=True)
class TubeTerm:
    """coefficient * t^(N - omega + level) * (log 1/t)^log_power"""
    omega: complex
    log_power: int
    coefficient: complex
    level: int
    row: Optional[int] = None


@dataclass
class TubeExpansion:
    """Finite residue expansion of a tube function"""
    ambient_dim: int
    level: int
    terms: list
    validity_t_max: float
    exact: bool
    error_exponent: Optional[float] = None
    pointwise: bool = True
    name: str = ""

    def sorted_terms(self):
        return sorted(self.terms, key=lambda term: (term.omega.imag, term.omega.real, term.log_power))


@dataclass(frozen=True)
class OscillatoryPeriod:
    """Vertical spacing p of a lattice pole row"""
    p: float

    def __post_init__(self):
        if self.p <= 0:
            raise ParameterRangeError("oscillatory period must be positive")

    @classmethod
    def from_ratio(cls, r):
        return cls(2 * math.pi / math.log(1 / r))


@dataclass
class DimensionReport:
    """Minkowski dimension, content and fractality verdict"""
    dimension: float
    content_lower: float
    content_upper: float
    measurable: Measurability
    classification: Classification
    content: Optional[float] = None
    gauge_content: Optional[float] = None
    subcritical_d: Optional[float] = None
    subcriticality_index: Optional[float] = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        def clean(x):
            if x is None:
                return None
            return "inf" if math.isinf(x) else float(x)
        return {
            "dimension": clean(self.dimension),
            "content": clean(self.content),
            "content_lower": clean(self.content_lower),
            "content_upper": clean(self.content_upper),
            "measurable": self.measurable.value,
            "gauge_content": clean(self.gauge_content),
            "classification": self.classification.value,
            "subcritical_d": clean(self.subcritical_d),
            "subcriticality_index": clean(self.subcriticality_index),
        }


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo sampling schedule"""
    samples: int = 100_000
    seed: int = 20240611
    chunk: int = 16

    def __post_init__(self):
        if self.samples < 10_000:
            raise ParameterRangeError("Monte Carlo needs at least 10^4 samples")
        if self.chunk < 1:
            raise ParameterRangeError("chunk must be positive")


@dataclass(frozen=True)
class McResult:
    value: complex
    stderr_re: float
    stderr_im: float
    samples: int


@dataclass
class ValidationReport:
    """Outcome of comparing an expansion with an oracle"""
    entry: str
    t: list
    formula: list
    oracle: list
    tail_bound: list
    tolerance: float
    relative: bool = False
    errors: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def abs_err(self):
        return [abs(f - o) for f, o in zip(self.formula, self.oracle)]

    @property
    def rel_err(self):
        return [abs(f - o) / abs(o) if o else abs(f - o) for f, o in zip(self.formula, self.oracle)]

    @property
    def sup_abs(self):
        return max(self.abs_err, default=0.0)

    @property
    def sup_rel(self):
        return max(self.rel_err, default=0.0)

    @property
    def passed(self):
        return not self.errors


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation and the settings it runs under"""
    command: str
    entry: Optional[str] = None
    params: dict = field(default_factory=dict)
    output_path: Optional[str] = None
    format: str = "text"
    seed: int = 20240611
    mc_samples: int = 100_000
    mc_chunk: int = 16
    k_trunc: int = 1000
    contour_tol: float = 1e-10
    pixel_resolution: int = 2048

    @classmethod
    def from_settings(cls, settings, command, entry=None, params=None, output_path=None, format="text",
                      **overrides):
        """Take the numeric settings from the app config; non-None overrides win"""
        values = dict(seed=settings["SEED"], mc_samples=settings["MC_SAMPLES"], mc_chunk=settings["MC_CHUNK"],
                      k_trunc=settings["K_TRUNC"], contour_tol=settings["CONTOUR_TOL"],
                      pixel_resolution=settings["PIXEL_RESOLUTION"])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(command, entry, dict(params or {}), output_path, format, **values)

    def mc_config(self):
        return McConfig(self.mc_samples, self.seed, self.mc_chunk)
