"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid user-facing configuration (unknown name, bad parameter range)."""


class SolverFailure(RuntimeError):
    """A linear stage solve did not meet its residual tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class NumericalBlowup(RuntimeError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, message: str, stage: int | None = None, step: int | None = None):
        super().__init__(message)
        self.stage = stage
        self.step = step
