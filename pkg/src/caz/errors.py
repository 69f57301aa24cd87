"""Exception types shared across the package."""


class CazError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CazError):
    """A point lies outside the model's domain, or outside a certified region."""


class TruncationError(CazError):
    """A truncation request cannot be satisfied (tolerance too small, cap exceeded)."""


class DegenerateSampleError(CazError):
    """The sample is numerically degenerate (e.g. vanishing leading coefficient)."""


class CertificationError(CazError):
    """Zero counting could not be certified by the winding-number check."""


class QuadratureError(CazError):
    """An adaptive quadrature failed to reach the requested agreement."""


class ConfigError(CazError):
    """Invalid configuration or command-line usage."""
