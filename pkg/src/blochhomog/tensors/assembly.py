"""
Assemblies of A*, B* and the three equivalent forms of B#.

Every entry is a mean over the quadrature nodes of the discretization that produced
the correctors:

    energy:        b#_jk = ∫ B(∇χ_k + e_k)·(∇χ_j + e_j)
    flux:          B#e_k = ∫ [B(∇χ_k + e_k) − A∇ψ_k]
    perturbation:  b#_jk = b*_jk + ∫ B∇(χ_k − ζ_k)·∇(χ_j − ζ_j)

The three coincide on the discrete level through the Galerkin weak forms of χ, ζ
and ψ, so their differences measure solver tolerance only.
"""

import numpy as np

from blochhomog.core.constants import (
    ASTAR,
    BSHARP_ENERGY,
    BSHARP_FLUX,
    BSHARP_PERTURBATION,
    BSTAR,
    CHI,
    PSI,
    ZETA,
)
from blochhomog.core.models import CoefficientField, CorrectorSet, HomogTensor, SolverConfig
from blochhomog.exceptions import GridMismatchError, StaleSolutionError, ValidationError
from blochhomog.logging_config import get_logger
from blochhomog.solver.cell import STALE_FACTOR, make_discretization, psi_residual

logger = get_logger(__name__)


def quadratic_tensor(coeff_q: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """T_jk = mean(C·right_k · left_j) over nodes.

    Args:
        coeff_q: (*nodes, N, N) coefficient.
        left: (K, *nodes, N) vector fields indexed by j.
        right: (K, *nodes, N) vector fields indexed by k.
    """
    dim = coeff_q.shape[-1]
    nodes = int(np.prod(coeff_q.shape[:-2]))
    c = coeff_q.reshape(nodes, dim, dim)
    lf = left.reshape(left.shape[0], nodes, dim)
    rt = right.reshape(right.shape[0], nodes, dim)
    return np.einsum("jqi,qil,kql->jk", lf, c, rt) / nodes


def _solver_config(correctors: CorrectorSet) -> SolverConfig:
    return SolverConfig(tol=correctors.tol, mode=correctors.mode, dealias=correctors.dealias)


def coefficients_for(field: CoefficientField, correctors: CorrectorSet) -> np.ndarray:
    """Coefficient on the correctors' quadrature nodes, checking the grid."""
    if field.resolution != correctors.resolution or field.dimension != correctors.dimension:
        raise GridMismatchError(
            "Correctors were solved on a different grid",
            expected=field.grid_shape,
            actual=(correctors.resolution,) * correctors.dimension,
        )
    disc = make_discretization(field.resolution, field.dimension, _solver_config(correctors))
    coeff_q = disc.quadrature_coefficients(field)
    if coeff_q.shape[:-2] != correctors.gradients.shape[1:-1]:
        raise GridMismatchError(
            "Corrector gradients are not on the field's quadrature nodes",
            expected=coeff_q.shape[:-2],
            actual=correctors.gradients.shape[1:-1],
        )
    return coeff_q


def check_compatible(first: CorrectorSet, second: CorrectorSet) -> None:
    if first.gradients.shape != second.gradients.shape or first.mode != second.mode:
        raise GridMismatchError(
            f"{first.kind} and {second.kind} correctors differ in grid or discretization",
            expected=first.gradients.shape,
            actual=second.gradients.shape,
        )


def assemble_homogenized(field: CoefficientField, correctors: CorrectorSet) -> HomogTensor:
    """a*_kl = ∫A(∇χ_k + e_k)·(∇χ_l + e_l); with B and ζ-correctors this is B*."""
    coeff_q = coefficients_for(field, correctors)
    total = correctors.total_gradients()
    raw = quadratic_tensor(coeff_q, total, total)
    provenance = BSTAR if correctors.kind == ZETA else ASTAR
    tensor = HomogTensor.from_raw(raw, provenance, correctors.resolution, correctors.tol)
    logger.info("Assembled %s: %s", provenance, np.array2string(tensor.matrix, precision=12))
    return tensor


def assemble_bsharp_energy(field_b: CoefficientField, chi: CorrectorSet) -> HomogTensor:
    """b#_jk = ∫B(∇χ_k + e_k)·(∇χ_j + e_j)."""
    if chi.kind != CHI:
        raise ValidationError("B# needs the correctors of A", field="kind", value=chi.kind)
    coeff_q = coefficients_for(field_b, chi)
    total = chi.total_gradients()
    raw = quadratic_tensor(coeff_q, total, total)
    return HomogTensor.from_raw(raw, BSHARP_ENERGY, chi.resolution, chi.tol)


def assemble_bsharp_flux(
    field_a: CoefficientField,
    field_b: CoefficientField,
    chi: CorrectorSet,
    psi: CorrectorSet,
) -> HomogTensor:
    """B#e_k = ∫[B(∇χ_k + e_k) − A∇ψ_k]; stores ς_k = mean(A∇ψ_k − B(∇χ_k + e_k)).

    Raises:
        StaleSolutionError: A stored ψ_k no longer meets the solver tolerance.
    """
    if psi.kind != PSI:
        raise ValidationError("Flux form needs ψ correctors", field="kind", value=psi.kind)
    check_compatible(chi, psi)
    a_q = coefficients_for(field_a, chi)
    b_q = coefficients_for(field_b, chi)

    cfg = _solver_config(psi)
    for chi_k, psi_k in zip(chi.solutions, psi.solutions):
        residual = psi_residual(field_a, field_b, chi_k, psi_k, cfg)
        if residual > STALE_FACTOR * psi.tol:
            raise StaleSolutionError(
                f"psi[{psi_k.direction + 1}] residual {residual:.3e} above tolerance {psi.tol:.1e}",
                residual=residual,
            )

    dim = field_a.dimension
    axes = tuple(range(1, chi.gradients.ndim - 1))
    total = chi.total_gradients()
    flux_b = np.einsum("...ij,k...j->k...i", b_q, total)
    flux_a = np.einsum("...ij,k...j->k...i", a_q, psi.gradients)
    averages = np.mean(flux_a - flux_b, axis=axes)  # (K, N): row k holds ς_k
    raw = -averages.T.reshape(dim, dim)
    return HomogTensor.from_raw(
        raw,
        BSHARP_FLUX,
        chi.resolution,
        chi.tol,
        extras={"flux_averages": averages},
    )


def assemble_bsharp_perturbation(
    field_b: CoefficientField,
    chi: CorrectorSet,
    zeta: CorrectorSet,
    bstar: HomogTensor,
) -> HomogTensor:
    """b#_jk = b*_jk + ∫B∇(χ_k − ζ_k)·∇(χ_j − ζ_j)."""
    if chi.kind != CHI or zeta.kind != ZETA:
        raise ValidationError("Perturbation form needs χ and ζ correctors", field="kind")
    check_compatible(chi, zeta)
    coeff_q = coefficients_for(field_b, zeta)
    difference = chi.gradients - zeta.gradients
    raw = bstar.matrix + quadratic_tensor(coeff_q, difference, difference)
    return HomogTensor.from_raw(raw, BSHARP_PERTURBATION, chi.resolution, chi.tol)


def corrector_gap(chi: CorrectorSet, zeta: CorrectorSet) -> float:
    """max_k RMS‖∇(χ_k − ζ_k)‖; zero iff B* = B# on the discrete level."""
    check_compatible(chi, zeta)
    difference = chi.gradients - zeta.gradients
    axes = tuple(range(1, difference.ndim))
    return float(np.max(np.sqrt(np.mean(difference**2, axis=axes) * difference.shape[-1])))


def tensor_distance(first: HomogTensor, second: HomogTensor, relative: bool = False) -> float:
    """Max-entry difference of two tensors, optionally relative to the second's norm."""
    gap = float(np.max(np.abs(first.matrix - second.matrix)))
    if relative:
        scale = float(np.linalg.norm(second.matrix))
        return gap / scale if scale > 0.0 else gap
    return gap

