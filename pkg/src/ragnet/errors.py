"""Exception hierarchy shared across the pipeline."""


class RagnetError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(RagnetError):
    """Malformed on-disk data (bad magic, truncation, garbage bytes).

    ``offset`` is the byte position at which the problem was detected,
    when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ConsistencyError(RagnetError):
    """Structurally valid data that contradicts itself (count mismatches,
    out-of-range labels)."""


class ArgumentError(RagnetError, ValueError):
    """Caller passed arguments violating an operation's preconditions."""


class ContractError(RagnetError):
    """An internal invariant or cross-component contract was violated
    (missing gradients, config mismatch on checkpoint load, ...)."""
