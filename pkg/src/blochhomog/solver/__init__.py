"""
Cell solvers: FFT-preconditioned Fourier-Galerkin and exact 1D fd-harmonic paths.
"""

from blochhomog.core.models import SolverConfig
from blochhomog.solver.cell import (
    apply_shifted_operator,
    competitor_energy,
    discretization_for,
    make_discretization,
    psi_residual,
    residual_rows,
    solve_corrector,
    solve_correctors,
    solve_psi,
    solve_psi_set,
    trial_gradient,
)
from blochhomog.solver.fd_harmonic import HalfCellGrid
from blochhomog.solver.pcg import PCGResult, conjugate_gradient
from blochhomog.solver.spectral import SpectralGrid, angular_wavenumbers

__all__ = [
    "SolverConfig",
    "apply_shifted_operator",
    "competitor_energy",
    "discretization_for",
    "make_discretization",
    "psi_residual",
    "residual_rows",
    "solve_corrector",
    "solve_correctors",
    "solve_psi",
    "solve_psi_set",
    "trial_gradient",
    "HalfCellGrid",
    "PCGResult",
    "conjugate_gradient",
    "SpectralGrid",
    "angular_wavenumbers",
]
