"""
Bloch waves: first eigenpairs, spectral half-Hessians and the discrete Bloch transform.
"""

from blochhomog.bloch.hessian import (
    gradient_at_zero,
    hessian_at_zero,
    point_key,
    spectral_tensors,
    stencil_modes,
    stencil_points,
)
from blochhomog.bloch.modes import (
    check_eta,
    dispersion,
    dispersion_columns,
    fix_phase,
    mode_derivative_error,
    nu1,
    nu1_twoscale,
    smallest_bloch_mode,
)
from blochhomog.bloch.transform import (
    apply_operator_via_bloch,
    bloch_basis,
    bloch_coefficient,
    bloch_vs_fourier,
    compact_bump,
    decompose,
    dual_indices,
    first_band_dominance,
    fourier_coefficient,
    fourier_matrix,
    global_operator,
    global_points,
    reconstruct,
    sample,
    solve_via_bloch,
)

__all__ = [
    "gradient_at_zero",
    "hessian_at_zero",
    "point_key",
    "spectral_tensors",
    "stencil_modes",
    "stencil_points",
    "check_eta",
    "dispersion",
    "dispersion_columns",
    "fix_phase",
    "mode_derivative_error",
    "nu1",
    "nu1_twoscale",
    "smallest_bloch_mode",
    "apply_operator_via_bloch",
    "bloch_basis",
    "bloch_coefficient",
    "bloch_vs_fourier",
    "compact_bump",
    "decompose",
    "dual_indices",
    "first_band_dominance",
    "fourier_coefficient",
    "fourier_matrix",
    "global_operator",
    "global_points",
    "reconstruct",
    "sample",
    "solve_via_bloch",
]
