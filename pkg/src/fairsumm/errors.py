"""Exception hierarchy shared across the package."""


class FairSummError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FairSummError, ValueError):
    """Input failed a structural or parameter check."""


class CorpusFormatError(ValidationError):
    """A corpus record could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InfeasibleError(FairSummError):
    """Fairness requirements cannot be met with the available units."""


class UnsupportedCardinalityError(FairSummError):
    """Operation is only defined for a specific number of groups."""
