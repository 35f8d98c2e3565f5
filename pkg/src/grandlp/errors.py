"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain of an operation."""


class ConvergenceError(RuntimeError):
    """An iterative procedure hit its bracket or iteration limits."""


class HypothesisError(ValueError):
    """A hypothesis of the ergodic theorem failed.

    ``check`` names the failing check (``"measure_preserving"`` or
    ``"exponent_invariant"``).
    """

    def __init__(self, check: str, message: str):
        super().__init__(f"{check}: {message}")
        self.check = check
