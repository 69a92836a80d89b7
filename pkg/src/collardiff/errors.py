"""Exception types shared across the package.

Two failure families matter to callers: bad input (DomainError and
friends, mapped to exit code 2 by the CLI) and numerical trouble
(QuadratureError, mapped to exit code 3).
"""


class DomainError(ValueError):
    """A parameter lies outside the domain an operation is defined on."""


class ValidationError(ValueError):
    """Malformed input data: JSON files, grids, coefficient tables."""


class InvalidMoveError(ValueError):
    """A pinch move cannot be applied to the surface it was aimed at."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class RankDeficiencyError(ValueError):
    """A Gram matrix failed its positive-definiteness check.

    Carries the offending (smallest) eigenvalue so callers can see how
    close to singular the basis was.
    """

    def __init__(self, message: str, eigenvalue: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class QuadratureError(RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""

    def __init__(self, message: str, estimate: float | None = None,
                 error: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
