"""Exception hierarchy shared by all shlab modules."""


class ShlabError(Exception):
    """Base class for all shlab-specific errors."""


class DomainError(ShlabError, ValueError):
    """Arguments outside the mathematical domain of an operation."""


class AdmissibilityError(ShlabError, ValueError):
    """Inverse-square coefficient exceeds the Hardy threshold (n-2)^2/4."""


class DegenerateError(ShlabError, ValueError):
    """Input produces a degenerate result (nonpositive envelope, bad fit data)."""


class BlowdownError(ShlabError, RuntimeError):
    """Radial steady-state profile crossed zero during integration."""


class RangeError(ShlabError, ValueError):
    """Requested point lies outside the computed range of a profile."""


class SolveError(ShlabError, RuntimeError):
    """Linear solve failed (singular or ill-posed tridiagonal system)."""


class NonFiniteError(ShlabError, RuntimeError):
    """A field or integrand became non-finite."""


class ComparisonViolation(ShlabError, RuntimeError):
    """Order relation 0 <= w <= barrier broken beyond tolerance."""


class EmptyRegionError(ShlabError, ValueError):
    """sqrt(t) falls outside the radial extent of the grid."""


class EigenError(ShlabError, RuntimeError):
    """Dense oracle could not be symmetrized or decomposed."""


class QuadratureError(ShlabError, RuntimeError):
    """Angular quadrature failed its self-consistency check."""


class DivisionError(ShlabError, ZeroDivisionError):
    """Zero denominator with a nonzero numerator in a measured ratio."""


class ConfigError(ShlabError, ValueError):
    """Malformed or missing configuration input."""
