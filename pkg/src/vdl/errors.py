"""Exception types shared across the package."""


class CapabilityError(ValueError):
    """Request exceeds what a numerical routine can honestly deliver.

    Raised e.g. when an oscillatory quadrature is asked for a cutoff so
    large that resolving every oscillation is infeasible; the message
    points the caller at the closed-form path instead.
    """


class ConvergenceError(ArithmeticError):
    """A series or quadrature failed to reach its target accuracy.

    Carries the best partial result and the achieved error estimate so
    callers can decide whether the partial answer is still usable.
    """

    def __init__(self, message: str, partial: float = float("nan"),
                 error_estimate: float = float("nan")):
        super().__init__(message)
        self.partial = partial
        self.error_estimate = error_estimate
