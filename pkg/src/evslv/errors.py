"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """Input does not satisfy an operation's preconditions."""


class NoInteriorFixedPoint(ArithmeticError):
    """The linear system r + A x = 0 restricted to a mask is singular."""

    def __init__(self, matrix, message=None):
        self.matrix = matrix
        super().__init__(message or f"singular restricted interaction matrix:\n{matrix}")


class NumericalBlowup(RuntimeError):
    """Integration produced a non-finite or negative state.

    ``trajectory`` holds everything recorded before the failure.
    """

    def __init__(self, time, reason, trajectory=None):
        self.time = time
        self.reason = reason
        self.trajectory = trajectory
        super().__init__(f"numerical blowup at t={time:.6g}: {reason}")


class ConfigError(ValueError):
    """A configuration field is missing or invalid. ``field`` is a dotted path."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
