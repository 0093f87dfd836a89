"""
Exact 1D path: face-harmonic finite differences on half-cells.

Unknowns sit at cell centres; the coefficient is constant per cell. A flux problem
div(a w' + s) = 0 with s given per half-cell has a constant flux c_f on the two
half-cells adjoining face f, which gives

    c_f = a_f·[(w_{j+1} − w_j)/h + ½(s_r/a_j + s_l/a_{j+1})],   a_f harmonic.

The periodic system is singular (constants); it is bordered with the zero-mean
constraint and solved directly. Half-cell slopes (c − s)/a integrate back exactly to
the nodal differences, and piecewise-constant problems are solved to round-off.
"""

from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from blochhomog.core.constants import FD_HARMONIC
from blochhomog.core.models import CellSolution, CoefficientField, SolverConfig
from blochhomog.exceptions import GridMismatchError, SolverError, ValidationError
from blochhomog.logging_config import get_logger

logger = get_logger(__name__)


def periodic_difference(n: int) -> sp.csr_matrix:
    """Forward difference (Dw)_j = w_{j+1} − w_j on the periodic grid."""
    diff = sp.diags([-np.ones(n), np.ones(n - 1)], [0, 1], shape=(n, n), format="lil")
    diff[n - 1, 0] = 1.0
    return diff.tocsr()


class HalfCellGrid:
    """Cell grid of n points whose quadrature nodes are the 2n half-cells."""

    mode = FD_HARMONIC

    def __init__(self, resolution: int, dimension: int = 1):
        if dimension != 1:
            raise ValidationError("fd-harmonic is a 1D discretization", field="mode", value=dimension)
        self.resolution = resolution
        self.dimension = 1
        self.dealias = False
        self.shape: Tuple[int, ...] = (resolution,)

    @property
    def quadrature_shape(self) -> Tuple[int, ...]:
        return (2 * self.resolution,)

    def quadrature_coefficients(self, field: CoefficientField) -> np.ndarray:
        if field.grid_shape != self.shape:
            raise GridMismatchError("Field does not match the solver grid", self.shape, field.grid_shape)
        return np.repeat(np.asarray(field.values), 2, axis=0)

    @staticmethod
    def flux_scale(coeff_q: np.ndarray, source_q: np.ndarray) -> float:
        """RMS(s) over the half-cell nodes."""
        return float(np.sqrt(np.mean(source_q[:, 0] ** 2)))

    def relative_residual(
        self,
        coeff_q: np.ndarray,
        gradient_q: np.ndarray,
        source_q: np.ndarray,
        reference: Optional[float] = None,
    ) -> float:
        """RMS spread of the half-cell flux, relative to RMS(s) or ``reference``."""
        flux = coeff_q[:, 0, 0] * gradient_q[:, 0] + source_q[:, 0]
        spread = float(np.sqrt(np.mean((flux - flux.mean()) ** 2)))
        scale = self.flux_scale(coeff_q, source_q) if reference is None else reference
        return spread / scale if scale > 0.0 else spread

    def solve_flux_problem(
        self,
        coeff_q: np.ndarray,
        source_q: np.ndarray,
        cfg: SolverConfig,
        direction: int = 0,
        label: str = "cell",
        reference: Optional[float] = None,
    ) -> CellSolution:
        """Zero-mean periodic w with (a w' + s)' = 0 by a bordered direct solve."""
        n = self.resolution
        h = 1.0 / n
        a = coeff_q[0::2, 0, 0]
        s = source_q[:, 0]
        s_left, s_right = s[0::2], s[1::2]
        a_next = np.roll(a, -1)

        a_face = 2.0 / (1.0 / a + 1.0 / a_next)
        beta = 0.5 * (s_right / a + np.roll(s_left, -1) / a_next)

        diff = periodic_difference(n)
        stiffness = diff.T @ sp.diags(a_face / h) @ diff
        ones = sp.csr_matrix(np.ones((n, 1)))
        bordered = sp.bmat([[stiffness, ones], [ones.T, None]], format="csc")
        rhs = np.concatenate([-(diff.T @ (a_face * beta)), [0.0]])

        solution = spsolve(bordered, rhs)
        if not np.all(np.isfinite(solution)):
            raise SolverError(f"{label}: singular fd-harmonic system")
        values = solution[:n]

        flux = a_face * (diff @ values) / h + a_face * beta
        gradient = np.empty(2 * n)
        gradient[1::2] = (flux - s_right) / a
        gradient[0::2] = (np.roll(flux, 1) - s_left) / a
        gradient_q = gradient[:, None]

        residual = self.relative_residual(coeff_q, gradient_q, source_q, reference)
        logger.debug("%s: direct solve, residual %.3e", label, residual)
        return CellSolution(
            values=values,
            gradient=gradient_q,
            residual=residual,
            iterations=1,
            direction=direction,
            history=[residual],
        )
