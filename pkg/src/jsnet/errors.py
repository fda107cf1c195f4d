"""Exception types shared across the package."""


class JsnetError(Exception):
    """Base class for all package errors."""


class DomainError(JsnetError, ValueError):
    """An input lies outside the domain of a Johnson family function."""

    def __init__(self, message, family=None, value=None, dimension=None):
        super().__init__(message)
        self.family = family
        self.value = value
        self.dimension = dimension


class DegenerateSpacing(JsnetError, ValueError):
    """Central percentile spacing is not positive (e.g. constant samples)."""

    def __init__(self, message, cls=None, dimension=None):
        super().__init__(message)
        self.cls = cls
        self.dimension = dimension


class FamilyMismatch(JsnetError, ValueError):
    """Percentile spacing is not compatible with the S_U family (mn/p^2 <= 1)."""

    def __init__(self, message, cls=None, dimension=None):
        super().__init__(message)
        self.cls = cls
        self.dimension = dimension


class SolveFailure(JsnetError, ArithmeticError):
    """Damped Newton system could not be factorized."""


class FactorizationError(JsnetError, ValueError):
    """Covariance matrix is not symmetric positive definite."""


class RangeError(JsnetError, ValueError):
    """A design parameter lies outside its admissible range."""


class NearRestError(JsnetError, ValueError):
    """Normalization denominator is too close to zero for some samples."""

    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class ParseError(JsnetError, ValueError):
    """Malformed input file."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class LabelError(JsnetError, ValueError):
    """Class labels are not the contiguous range 1..C."""
