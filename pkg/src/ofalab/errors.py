"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Model parameters violate a modelling assumption or a type invariant."""


class DomainError(ArithmeticError):
    """A closed-form expression left its real domain beyond round-off slack."""


class ConvergenceError(RuntimeError):
    """An iterative routine failed to reach its tolerance."""
