"""Finite-scale tools for combinatorial colorings, submeasures, fronts and evaluation norms."""

__version__ = "0.1.0"

from .core_sets import CompactFamily, FinSet, SetFamily  # noqa: E402
from .errors import ArtifactError, BudgetExceeded, ValidationError  # noqa: E402

__all__ = ["ArtifactError", "BudgetExceeded", "CompactFamily", "FinSet", "SetFamily", "ValidationError",
           "__version__"]
