"""Exception types shared across the package."""


class MalformedInput(ValueError):
    """Input data violates a structural invariant (non-monotone CDF, bad matrix, ...)."""


class SpaceMismatch(ValueError):
    """Two measures live on different spaces or have different support sizes."""


class ConstructiveFailure(RuntimeError):
    """A constructive step (path disentanglement, routing) exhausted its retry budget.

    Raised instead of returning a map that violates its certificates.
    """


class NormalityDefectExceeded(ValueError):
    """Matrix is too far from normal for spectral matching to be meaningful."""
