"""Exception hierarchy shared by all modules."""


class CircleChainError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CircleChainError, ValueError):
    """Malformed or non-finite input data."""


class DomainError(CircleChainError, ValueError):
    """Evaluation requested outside the open unit disk."""


class QuadratureError(CircleChainError):
    """Requested accuracy could not be reached within the subdivision budget."""

    def __init__(self, message, section=None):
        super().__init__(message)
        self.section = section


class NotIntegrableError(CircleChainError):
    """A function handed to a Fourier integral has a non-integrable endpoint."""


class ClassificationError(CircleChainError):
    """A singular point could not be classified (oscillatory, or beyond nmax)."""

    def __init__(self, message, location=None, outcome="unclassifiable"):
        super().__init__(message)
        self.location = location
        self.outcome = outcome


class PipelineError(CircleChainError):
    """Failure inside the reconstruction pipeline; ``stage`` names the step."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
