"""Shared exception types."""


class PreconditionError(ValueError):
    """An operation was called outside its documented contract."""


class ReconstructionError(RuntimeError):
    """Numeric-to-exact reconstruction could not be stabilised."""
