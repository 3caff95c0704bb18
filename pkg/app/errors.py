"""Exception hierarchy shared by the numerical modules and the CLI.

Every error carries the process exit code the CLI reports for it:
3 for numerical failures, 4 for input or validation failures.
"""


class FractalError(Exception):
    """Base class for every error raised by the toolkit"""
    exit_code = 3


# Numerical failures

class PoleError(FractalError):
    """Evaluation requested at (or too close to) a pole"""


class GammaPoleError(FractalError):
    """Gamma ratio is singular (Pochhammer with negative index)"""


class QuadratureError(FractalError):
    """A quadrature did not converge to the requested tolerance"""


class BoundaryPoleError(FractalError):
    """A root or pole sits on the boundary of a search rectangle"""


class CountMismatchError(FractalError):
    """Refined roots disagree with the argument-principle count"""


class DivergenceError(FractalError):
    """Direct summation requested left of the abscissa of convergence"""


class InsufficientDepthError(FractalError):
    """Truncation depth too small for the requested continuation"""


class ScreenPoleError(FractalError):
    """A vertical screen passes through a pole"""


class ResidualError(FractalError):
    """Imaginary residual of a real quantity exceeds tolerance"""


class NonintegrableError(FractalError):
    """Integrand exponent is not integrable near the set"""


class ResolutionError(FractalError):
    """Pixel grid too coarse for the requested neighborhood"""


class LanguidityError(FractalError):
    """Languidity hypothesis of a tube formula is not met"""


class MismatchError(FractalError):
    """Handles or volumes passed to a transform are inconsistent"""


# Input and validation failures

class UnknownEntryError(FractalError):
    """No catalog entry with the requested name"""
    exit_code = 4


class ParameterRangeError(FractalError):
    """Entry parameter outside its documented range"""
    exit_code = 4


class DeltaTooSmallError(FractalError):
    """delta too small for Omega to lie inside the delta-neighborhood"""
    exit_code = 4


class ValidityError(FractalError):
    """t outside the validity interval of a formula"""
    exit_code = 4


class InsufficientDimsError(FractalError):
    """Dimension list does not reach the critical line"""
    exit_code = 4


class ValidationFailure(FractalError):
    """A validation suite reported failing checks"""
    exit_code = 4
