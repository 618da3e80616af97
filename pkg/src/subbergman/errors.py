class DomainError(ValueError):
    """A point lies outside the region where an operation is defined."""


class ContractionError(ArithmeticError):
    """A matrix that must be positive semidefinite has a clearly negative eigenvalue.

    This signals a broken contraction upstream (bad symbol, truncation bug),
    not rounding noise.
    """


class ProbeError(RuntimeError):
    """The evaluator failed or returned a non-finite value along a probe path."""
