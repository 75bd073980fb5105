"""
Exception hierarchy shared by the laboratory modules.
"""
from typing import Optional, Sequence


class LabError(Exception):
    """Base class for every error raised by the laboratory."""

    exit_code: int = 2


class ConfigurationError(LabError):
    """Unparseable descriptor, bad flag or invalid experiment configuration."""

    exit_code = 64

    def __init__(self, message: str, errors: Optional[Sequence[str]] = None):
        self.errors = list(errors or [])
        if self.errors:
            message = f"{message}: {'; '.join(self.errors)}"
        super().__init__(message)


class ArtifactError(LabError):
    """Reading an input file or writing an output artifact failed."""

    exit_code = 74


class PreconditionError(LabError):
    """An operation was called on inputs outside its domain."""


class GeometryError(LabError):
    """Surface or profile is not a closed, embedded, smooth sphere."""


class NumericalError(LabError):
    """A numerical procedure failed or produced non-finite values."""


class DefinitenessError(NumericalError):
    """A weight that must be strictly positive is not."""


class ResolutionError(NumericalError):
    """Samples and quadrature grid do not match."""


class ConvergenceError(NumericalError):
    """Truncation refinement did not reach the requested tolerance."""

    def __init__(self, message: str, last_values: Sequence[float] = ()):
        self.last_values = tuple(last_values)
        if self.last_values:
            shown = ', '.join(f'{v:.12g}' for v in self.last_values)
            message = f"{message} (last lambda1 values: {shown})"
        super().__init__(message)


class RadiusTooLargeError(NumericalError):
    """Geodesic sphere radius reaches a conjugate point."""


class FlowFailure(NumericalError):
    """Quasi-spherical flow lost positivity or blew up."""


class ConsistencyError(NumericalError):
    """Monotone quantity increased beyond tolerance."""
