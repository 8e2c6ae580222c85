"""Exact-arithmetic toolkit: semidirect products of exact categories with
bimodules, split square-zero extensions, finite-level S-constructions and
Grothendieck-group comparisons over concrete finite-ring module categories.
"""

from .abgrp import (
    FinAbGroup,
    GroupElement,
    GroupHom,
    IntMatrix,
    is_short_exact,
    kernel_generators,
    pullback,
    smith_normal_form,
    solve,
)
from .errors import (
    BiexactnessError,
    Budget,
    BudgetExceeded,
    DslError,
    ExactkitError,
    MediationError,
    SquareZeroViolation,
    Unsupported,
)

__all__ = [
    "FinAbGroup",
    "GroupElement",
    "GroupHom",
    "IntMatrix",
    "is_short_exact",
    "kernel_generators",
    "pullback",
    "smith_normal_form",
    "solve",
    "Budget",
    "BudgetExceeded",
    "BiexactnessError",
    "DslError",
    "ExactkitError",
    "MediationError",
    "SquareZeroViolation",
    "Unsupported",
]
