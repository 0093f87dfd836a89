"""
Custom Exceptions for blochhomog

Provides a hierarchy of exceptions for standardized error handling across all modules.
Every exception carries a machine-readable ``reason`` code that the CLI copies into
the run report and maps onto an exit code.

Exception Hierarchy:
    BlochHomogError (base)
    ├── ConfigurationError
    ├── ValidationError
    │   └── UnsupportedFactorError
    ├── GridMismatchError
    ├── SolverError
    │   ├── ConvergenceError
    │   ├── HermiticityError
    │   └── StaleSolutionError
    ├── EvaluationError
    ├── BlochError
    │   ├── DualGridError
    │   └── BandIndexError
    ├── BoundaryResidualError
    └── ReportError
"""

from typing import Any, Optional, Sequence


class BlochHomogError(Exception):
    """Base exception for all blochhomog errors."""

    reason: str = "error"

    def __init__(self, message: str, *args, **kwargs):
        self.message = message
        super().__init__(message, *args, **kwargs)


# Configuration Errors
class ConfigurationError(BlochHomogError):
    """Raised when a run configuration cannot be parsed or is incomplete."""

    reason = "configuration"


# Validation Errors
class ValidationError(BlochHomogError):
    """Raised when input validation fails."""

    reason = "validation"

    def __init__(self, message: str, field: Optional[str] = None, value: Any = None):
        self.field = field
        self.value = value
        super().__init__(message)


class UnsupportedFactorError(ValidationError):
    """Raised when a two-scale factor is not a small-denominator rational."""

    reason = "unsupported_factor"

    def __init__(self, factor: Any):
        super().__init__(f"Unsupported scale factor: {factor!r}", field="factor", value=factor)
        self.factor = factor


class GridMismatchError(BlochHomogError):
    """Raised when fields, correctors or grid functions live on different grids."""

    reason = "grid_mismatch"

    def __init__(self, message: str, expected: Any = None, actual: Any = None):
        self.expected = expected
        self.actual = actual
        super().__init__(message)


# Solver Errors
class SolverError(BlochHomogError):
    """Base exception for linear and eigen solver failures."""

    reason = "solver"


class ConvergenceError(SolverError):
    """Raised when an iteration does not reach its tolerance."""

    reason = "non_convergence"

    def __init__(self, message: str, iterations: Optional[int] = None, residual: Optional[float] = None):
        self.iterations = iterations
        self.residual = residual
        super().__init__(message)


class HermiticityError(SolverError):
    """Raised when a quadratic form that must be real has an imaginary part."""

    reason = "hermiticity"

    def __init__(self, message: str, imag_part: Optional[float] = None):
        self.imag_part = imag_part
        super().__init__(message)


class StaleSolutionError(SolverError):
    """Raised when a stored cell solution no longer satisfies its equation."""

    reason = "stale_solution"

    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        super().__init__(message)


class EvaluationError(BlochHomogError):
    """Raised when a scalar map cannot be evaluated at a stencil point."""

    reason = "evaluation"

    def __init__(self, message: str, point: Optional[Sequence[float]] = None):
        self.point = point
        super().__init__(message)


# Bloch transform Errors
class BlochError(BlochHomogError):
    """Base exception for Bloch decomposition errors."""

    reason = "bloch"


class DualGridError(BlochError):
    """Raised when a dual point is not on the discrete dual grid."""

    reason = "dual_grid"


class BandIndexError(BlochError):
    """Raised when a band index is outside 1..n^N."""

    reason = "band_index"

    def __init__(self, band: int, band_count: int):
        self.band = band
        self.band_count = band_count
        super().__init__(f"Band {band} outside 1..{band_count}")


class BoundaryResidualError(BlochHomogError):
    """Raised when a 1D adjoint state violates its boundary condition."""

    reason = "boundary_residual"

    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        super().__init__(message)


class ReportError(BlochHomogError):
    """Raised when report artifacts cannot be written."""

    reason = "report_io"
