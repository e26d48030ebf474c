class ToolkitError(Exception):
    """Base class for errors raised by the torsion toolkit."""


class PreconditionError(ToolkitError, ValueError):
    """An operation was called outside its domain (odd degree, p <= 3, ...)."""


class RingMismatchError(PreconditionError):
    """Two operands live over different coefficient rings."""


class InsufficientPrecisionError(PreconditionError):
    """A q-expansion is too short for the requested computation."""


class CacheMismatchError(ToolkitError):
    """A cached value differs from its recomputation."""
