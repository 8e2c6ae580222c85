"""Exception types and enumeration budgets shared across the package."""

from __future__ import annotations

DEFAULT_MAX_ENUM = 500_000


class ExactkitError(Exception):
    pass


class DimensionMismatch(ExactkitError, ValueError):
    pass


class Unsupported(ExactkitError, ValueError):
    """Requested operation is not available for this model (e.g. infinite hom group)."""


class SquareZeroViolation(ExactkitError, ValueError):
    """A split extension failed the square-zero condition."""


class BiexactnessError(ExactkitError, ValueError):
    """A bimodule failed biexactness against the witness set."""


class MediationError(ExactkitError, ValueError):
    """A universal-property mediator was requested for an invalid cone."""


class BudgetExceeded(ExactkitError, RuntimeError):
    """An enumeration exceeded the configured budget; results were not truncated."""


class DslError(ExactkitError, ValueError):
    def __init__(self, line: int, col: int, message: str):
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"line {line}, col {col}: {message}")


class Budget:
    """Counts enumeration steps and raises instead of silently truncating."""

    def __init__(self, max_items: int | None = None):
        self.max_items = DEFAULT_MAX_ENUM if max_items is None else max_items
        self.used = 0

    def spend(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.max_items:
            raise BudgetExceeded(
                f"enumeration budget exceeded: {self.used} > {self.max_items}"
            )

    def child(self) -> "Budget":
        return self
