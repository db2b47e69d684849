"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates a structural contract (shape, labels, normalization)."""


class BudgetError(RuntimeError):
    """A requested computation exceeds the configured combinatorial or matrix budget."""
