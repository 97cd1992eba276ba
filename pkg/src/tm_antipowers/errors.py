"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class TmError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TmError, ValueError):
    """An argument lies outside the domain of the operation (exit code 1)."""


class HypothesisError(DomainError):
    """A parameter fails the floor or hypothesis required by a construction."""


class CodingError(DomainError):
    """A word cannot be decoded over the block alphabet {01, 10}."""

    def __init__(self, block_index: int, block: str):
        super().__init__(f"block {block_index} is {block!r}, not 01 or 10")
        self.block_index = block_index
        self.block = block


class ResourceError(TmError):
    """A request would exceed the configured memory cap (exit code 2)."""


class InternalInconsistencyError(TmError):
    """A proven guarantee was violated, which means a bug here (exit code 3)."""
