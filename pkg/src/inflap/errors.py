"""Exception types shared across the package."""


class InflapError(Exception):
    """Base class for all package errors."""


class InputError(InflapError, ValueError):
    """Malformed input: unknown vertex ids, bad file contents, invalid parameters."""


class DomainError(InflapError, ValueError):
    """An operator was evaluated where it is undefined (e.g. an isolated vertex)."""


class TruncationError(InflapError):
    """The answer depends on neighbors that a truncated graph does not expose."""


class PreconditionError(InflapError):
    """A mathematical hypothesis of the requested operation is not satisfied."""
