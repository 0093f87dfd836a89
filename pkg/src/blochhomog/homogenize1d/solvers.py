"""
State and adjoint solves of the 1D problems.

State:    −(a u′)′ = f,        u(0) = u(1) = 0
Adjoint:  (a p′ − b u′)′ = 0,  p(0) = p(1) = 0

The state uses linear finite elements with element-constant a, which is nodally
exact in 1D. The adjoint flux z = a p′ − b u′ is a constant fixed by the boundary
conditions, so p is obtained by quadrature.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from blochhomog.core.constants import BOUNDARY_TOL
from blochhomog.exceptions import BoundaryResidualError, GridMismatchError, SolverError
from blochhomog.homogenize1d.problem import EpsilonProblem
from blochhomog.logging_config import get_logger

logger = get_logger(__name__)


@dataclass
class StateSolution:
    """Nodal u and element fluxes σ = a u′."""

    nodes: np.ndarray
    u: np.ndarray
    sigma: np.ndarray

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.u) / np.diff(self.nodes)


@dataclass
class AdjointSolution:
    """Nodal p, element fluxes z = a p′ − b u′ and the constant they share."""

    p: np.ndarray
    z: np.ndarray
    constant: float
    boundary_residual: float

    @property
    def z_spread(self) -> float:
        return float(np.max(np.abs(self.z - self.constant))) if self.z.size else 0.0


def stiffness_matrix(a: np.ndarray, h: float) -> sp.csc_matrix:
    """Interior stiffness of element-constant a on a uniform mesh."""
    main = (a[:-1] + a[1:]) / h
    off = -a[1:-1] / h
    return sp.diags([off, main, off], [-1, 0, 1], format="csc")


def solve_state(a: np.ndarray, load: np.ndarray, h: float) -> np.ndarray:
    """Nodal solution with zero boundary values for element coefficients ``a``."""
    if load.size != a.size + 1:
        raise GridMismatchError("Load and coefficient sizes disagree", a.size + 1, load.size)
    u = np.zeros(a.size + 1)
    if a.size > 1:
        u[1:-1] = spsolve(stiffness_matrix(a, h), load[1:-1])
    if not np.all(np.isfinite(u)):
        raise SolverError("Singular 1D state system")
    return u


def solve_adjoint(a: np.ndarray, b: np.ndarray, u_slopes: np.ndarray, h: float) -> AdjointSolution:
    """p with (a p′ − b u′)′ = 0 and zero boundary values for element data."""
    weight = np.sum(h / a)
    constant = -float(np.sum(b * u_slopes * h / a)) / weight
    slopes = (constant + b * u_slopes) / a
    p = np.concatenate([[0.0], np.cumsum(slopes * h)])
    residual = abs(float(p[-1]))
    if residual > BOUNDARY_TOL * max(1.0, float(np.max(np.abs(p)))):
        raise BoundaryResidualError(f"Adjoint boundary residual {residual:.3e}", residual=residual)
    z = a * slopes - b * u_slopes
    return AdjointSolution(p=p, z=z, constant=constant, boundary_residual=residual)


def solve_state_1d(prob: EpsilonProblem) -> StateSolution:
    """u^ε and σ^ε = a^ε u^ε′ (element values) for one ε.

    Example:
        >>> sol = solve_state_1d(EpsilonProblem(PresetSpec("constant"), PresetSpec("constant"), 1))
        >>> float(sol.u[16])
        0.125
    """
    a = prob.a_segments()
    u = solve_state(a, prob.load_vector(), prob.h)
    sigma = a * np.diff(u) / prob.h
    logger.debug("State solve: ε = %g, %d elements", prob.eps, prob.elements)
    return StateSolution(nodes=prob.nodes, u=u, sigma=sigma)


def solve_adjoint_1d(prob: EpsilonProblem, state: StateSolution) -> AdjointSolution:
    """p^ε and z^ε = a^ε p^ε′ − b^ε u^ε′ for one ε.

    Raises:
        BoundaryResidualError: p^ε(1) above 1e-12 (relative to max|p|).
        GridMismatchError: State from another grid.
    """
    if state.u.size != prob.elements + 1:
        raise GridMismatchError("State solution from another grid", prob.elements + 1, state.u.size)
    return solve_adjoint(prob.a_segments(), prob.b_segments(), state.slopes, prob.h)
