"""
Core modules for blochhomog.

Contains shared constants and dataclass models.
"""

from blochhomog.core.models import (
    BlochDecomposition,
    BlochMode,
    BoundLink,
    BoundsReport,
    CellSolution,
    CoefficientField,
    ConvergenceTable,
    CorrectorSet,
    HomogTensor,
    SolverConfig,
    ValidationReport,
)

__all__ = [
    "BlochDecomposition",
    "BlochMode",
    "BoundLink",
    "BoundsReport",
    "CellSolution",
    "CoefficientField",
    "ConvergenceTable",
    "CorrectorSet",
    "HomogTensor",
    "SolverConfig",
    "ValidationReport",
]
