"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class PrecisionBudgetError(RuntimeError):
    """A requested accuracy cannot be certified within the configured caps."""


class CountMismatchError(RuntimeError):
    """Root bookkeeping disagrees with the argument-principle count."""


class ConvergenceError(RuntimeError):
    """An iterative scheme failed to converge at maximum refinement."""
