"""Exception taxonomy shared by every module.

All errors raised on purpose by this package derive from HomsenseError so
callers (and the CLI) can distinguish our failures from genuine bugs.
"""

__all__ = [
    "HomsenseError",
    "InvalidSpec",
    "NonConvergent",
    "NonConvergentSum",
    "QuadratureFailure",
    "GridTooCoarse",
    "ZeroAnchor",
    "SingularMatrix",
    "NoRoot",
    "NonMonotoneWindow",
    "DegenerateDerivative",
    "InvalidAlpha",
    "SingularPoint",
]


class HomsenseError(Exception):
    """Base class for all package-level failures."""


class InvalidSpec(HomsenseError, ValueError):
    """A state or detector description violates its parameter domain."""


class NonConvergent(HomsenseError):
    """An iterative numerical routine hit its refinement cap."""


class NonConvergentSum(NonConvergent):
    """A truncated series cannot reach the requested tail tolerance."""


class QuadratureFailure(NonConvergent):
    """Adaptive quadrature failed to meet its tolerance, or produced a
    result violating a realness constraint."""


class GridTooCoarse(HomsenseError):
    """A sampled Wigner grid fails its normalization sanity check."""


class ZeroAnchor(HomsenseError):
    """Amplitude reconstruction needs f(0) but |f(0)| is numerically zero."""


class SingularMatrix(HomsenseError):
    """A Fisher-information matrix cannot be inverted."""


class NoRoot(HomsenseError):
    """The dip equation has no solution inside the search window."""


class NonMonotoneWindow(HomsenseError):
    """An estimation window was expected to be monotone in the dip value
    but is not, so the inversion is ambiguous."""


class DegenerateDerivative(HomsenseError):
    """A sensitivity denominator vanished where a finite value was needed."""


class InvalidAlpha(HomsenseError, ValueError):
    """A Gaussian moment was requested with a non-decaying exponent."""


class SingularPoint(HomsenseError):
    """Evaluation requested exactly at a removable singularity."""
