"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed job document, function spec, or tensor literal."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of the requested operation."""


class NumericalError(RuntimeError):
    """A computation could not be completed to acceptable accuracy."""
