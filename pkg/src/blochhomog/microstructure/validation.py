"""
Ellipticity validation and cell averages of coefficient fields.
"""

import numpy as np

from blochhomog.core.models import CoefficientField, ValidationReport
from blochhomog.exceptions import ValidationError
from blochhomog.utils.grid import grid_mean


def validate_ellipticity(field: CoefficientField, alpha: float, beta: float) -> ValidationReport:
    """Check α|ξ|² ≤ ξᵀA(y)ξ and |A(y)ξ| ≤ β|ξ| at every grid point.

    For symmetric matrices both reduce to α ≤ eig_min(A(y)) and eig_max(A(y)) ≤ β.
    Failures are reported, not raised.

    Args:
        field: Coefficient field.
        alpha: Coercivity constant.
        beta: Boundedness constant.

    Returns:
        Report with worst-case eigenvalues, pass/fail flags and the number of
        failing grid points.
    """
    eigs = np.linalg.eigvalsh(field.values)
    lowest = eigs[..., 0]
    highest = eigs[..., -1]
    tol = 1e-12 * max(1.0, abs(beta))
    failing = (lowest < alpha - tol) | (highest > beta + tol)
    worst = np.unravel_index(int(np.argmin(lowest)), lowest.shape)
    return ValidationReport(
        alpha=float(alpha),
        beta=float(beta),
        min_eigenvalue=float(lowest.min()),
        max_eigenvalue=float(highest.max()),
        coercive=bool(lowest.min() >= alpha - tol),
        bounded=bool(highest.max() <= beta + tol),
        failing_points=int(np.count_nonzero(failing)),
        worst_point=tuple(int(i) for i in worst),
    )


def cell_average(field: CoefficientField) -> np.ndarray:
    """Arithmetic mean of A over the cell."""
    return grid_mean(field.values, field.dimension)


def harmonic_average(field: CoefficientField) -> np.ndarray:
    """inv(mean(A⁻¹)); raises when mean(A⁻¹) is singular."""
    try:
        inverse_mean = grid_mean(np.linalg.inv(field.values), field.dimension)
        return np.linalg.inv(inverse_mean)
    except np.linalg.LinAlgError as exc:
        raise ValidationError("Singular mean of inverse coefficient", field="values") from exc
