"""Shared exception types."""


class DomainError(ValueError):
    """Evaluation time outside the trajectory horizon."""


class ParameterError(ValueError):
    """Argument outside an operation's documented precondition."""


class UnsupportedKindError(ValueError):
    """Operation not defined for this trajectory kind."""


class SizeError(ValueError):
    """Instance too large for an exhaustive/oracle operation."""


class AuditFailure(AssertionError):
    """A checked inequality was violated; carries the offending record."""

    def __init__(self, message: str, record=None):
        super().__init__(message)
        self.record = record
