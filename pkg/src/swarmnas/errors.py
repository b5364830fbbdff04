"""Exception types shared across the package."""


class SwarmNasError(Exception):
    """Base class for package-specific failures."""


class InfeasibleArchitectureError(SwarmNasError):
    """The genotype expands to a network whose spatial size collapses to zero."""


class EvaluationError(SwarmNasError):
    """Objective evaluation failed; carries the offending genotype."""

    def __init__(self, message, genotype=None):
        super().__init__(message)
        self.genotype = genotype


class CacheCorruptError(SwarmNasError):
    """The persisted accuracy cache could not be parsed."""

    def __init__(self, path, line_number, message):
        super().__init__(f"{path}:{line_number}: {message}")
        self.path = path
        self.line_number = line_number


class NoLeadersError(SwarmNasError):
    """Leader selection was attempted on an empty leader archive."""


class BatchFailedError(SwarmNasError):
    """A dispatched batch could not be completed after retries."""
