"""
1D ε-problems: state and adjoint solves, analytic limits and flux convergence tables.
"""

from blochhomog.homogenize1d.convergence import (
    CONVERGENCE_COLUMNS,
    LIMIT_BSHARP,
    LIMIT_BSTAR,
    antiderivative_norm,
    epsilon_row,
    flux_convergence,
)
from blochhomog.homogenize1d.limits import Limits1D, analytic_1d_limits
from blochhomog.homogenize1d.problem import EpsilonProblem, breakpoints, scalar_profile
from blochhomog.homogenize1d.solvers import (
    AdjointSolution,
    StateSolution,
    solve_adjoint_1d,
    solve_state_1d,
)

__all__ = [
    "CONVERGENCE_COLUMNS",
    "LIMIT_BSHARP",
    "LIMIT_BSTAR",
    "antiderivative_norm",
    "epsilon_row",
    "flux_convergence",
    "Limits1D",
    "analytic_1d_limits",
    "EpsilonProblem",
    "breakpoints",
    "scalar_profile",
    "AdjointSolution",
    "StateSolution",
    "solve_adjoint_1d",
    "solve_state_1d",
]
