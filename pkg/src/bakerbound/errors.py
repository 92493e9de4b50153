"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a documented precondition (bad parameter,
    inadmissible height, value outside a function's domain)."""


class CapExceededError(RuntimeError):
    """An exhaustive enumeration would exceed the configured candidate cap."""


class FitRejectedError(ValueError):
    """Envelope fitting produced parameters outside the admissible region,
    or the data cannot be covered by the requested envelope shape."""


class SingularSystemError(ValueError):
    """The simultaneous approximation linear system is rank-deficient for
    the requested index vector."""
