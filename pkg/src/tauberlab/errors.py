"""Exception types shared across the package."""


class TauberlabError(Exception):
    """Base class for all errors raised by tauberlab."""


class DomainError(TauberlabError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class ModelMismatchError(DomainError):
    """Operands belong to different semigroup models."""


class HorizonError(TauberlabError, LookupError):
    """A value beyond the truncation horizon was requested.

    Raised instead of silently returning zero: coefficients outside the
    horizon are unknown, not zero.
    """


class HalfPlaneError(DomainError):
    """Evaluation point lies outside the closed right half-plane."""


class NeumannConvergenceError(TauberlabError):
    """The geometric-series inversion does not apply (norm >= 1)."""

    def __init__(self, norm: float, message: str | None = None):
        self.norm = norm
        super().__init__(message or f"Neumann inversion inapplicable: element norm {norm!r} >= 1")


class EnumerationCapError(TauberlabError):
    """Enumerating elements up to the requested bound exceeds the configured cap."""


class ScenarioError(TauberlabError):
    """A scenario file failed to parse or validate (CLI exit code 2)."""
