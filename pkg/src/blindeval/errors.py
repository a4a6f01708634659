"""Exception hierarchy shared across the harness."""


class HarnessError(Exception):
    """Base class for all harness errors."""


class DuplicateIdError(HarnessError):
    pass


class ValidationError(HarnessError):
    pass


class BlindingError(HarnessError):
    pass


class BlindingLeakError(HarnessError):
    """A judge-facing artifact contains candidate provenance strings."""


class RenderError(HarnessError):
    pass


class StageError(HarnessError):
    """Illegal prompt-refinement session transition."""


class ProviderConfigError(HarnessError):
    pass


class TransportError(HarnessError):
    """HTTP call failed after exhausting retries."""

    def __init__(self, message, status=None, attempts=None):
        super().__init__(message)
        self.status = status
        self.attempts = attempts


class ParseError(HarnessError):
    pass


class StatsError(HarnessError):
    pass


class DegenerateInputError(StatsError):
    """Statistic undefined for this input (e.g. everything tied)."""


class RunDirectoryError(HarnessError):
    pass
