"""
Homogenized tensors: assemblies, two-scale B#, bounds and the Lagrangian check.
"""

from blochhomog.tensors.assembly import (
    assemble_bsharp_energy,
    assemble_bsharp_flux,
    assemble_bsharp_perturbation,
    assemble_homogenized,
    corrector_gap,
    quadratic_tensor,
    tensor_distance,
)
from blochhomog.tensors.bounds import check_bounds, psd_margin
from blochhomog.tensors.report import tensor_rows, tensor_to_text, tensors_to_text
from blochhomog.tensors.twoscale import assemble_bsharp_twoscale, twoscale_from_correctors
from blochhomog.tensors.variational import (
    LagrangianValue,
    lagrangian,
    lagrangian_value,
    lagrangian_with_trial,
)

__all__ = [
    "assemble_bsharp_energy",
    "assemble_bsharp_flux",
    "assemble_bsharp_perturbation",
    "assemble_homogenized",
    "corrector_gap",
    "quadratic_tensor",
    "tensor_distance",
    "check_bounds",
    "psd_margin",
    "tensor_rows",
    "tensor_to_text",
    "tensors_to_text",
    "assemble_bsharp_twoscale",
    "twoscale_from_correctors",
    "LagrangianValue",
    "lagrangian",
    "lagrangian_value",
    "lagrangian_with_trial",
]
