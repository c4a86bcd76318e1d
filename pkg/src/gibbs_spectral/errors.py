"""Exception types shared across the package."""


class GibbsSpectralError(Exception):
    """Base class for errors raised by this package."""


class GraphFormatError(ValueError, GibbsSpectralError):
    """Malformed edge-list or pinning file."""


class ResourceLimitError(RuntimeError, GibbsSpectralError):
    """A configured cap (walk count, tree nodes, state space, labels) was exceeded."""


class ConvergenceError(RuntimeError, GibbsSpectralError):
    """An iterative solver did not reach the requested tolerance."""


class DegenerateConditioningError(ValueError, GibbsSpectralError):
    """Conditioning event has probability zero."""


class VerificationError(GibbsSpectralError):
    """An internal consistency check reported a violation."""
