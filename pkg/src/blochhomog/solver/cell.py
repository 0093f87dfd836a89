"""
Cell problems on the unit torus.

χ_k:  −div(A(∇χ_k + e_k)) = 0           (the same solve with B gives ζ_k)
ψ_k:   div(A∇ψ_k − B(∇χ_k + e_k)) = 0

All three are instances of the flux problem div(A∇w + s) = 0 with a source flux s
given on quadrature nodes, which each discretization solves for zero-mean w.
ψ residuals are measured against the size of the source flux B(∇χ_k + e_k).
"""

from typing import List, Optional, Sequence, Union

import numpy as np

from blochhomog.core.constants import CHI, FD_HARMONIC, PSI, ZETA
from blochhomog.core.models import CellSolution, CoefficientField, CorrectorSet, SolverConfig
from blochhomog.exceptions import GridMismatchError, StaleSolutionError, ValidationError
from blochhomog.logging_config import get_logger
from blochhomog.solver.fd_harmonic import HalfCellGrid
from blochhomog.solver.spectral import SpectralGrid
from blochhomog.utils.io import residual_history_rows
from blochhomog.utils.parallel import parallel_map

logger = get_logger(__name__)

Discretization = Union[SpectralGrid, HalfCellGrid]

# Stored solutions may exceed the solve tolerance by this factor before being stale
STALE_FACTOR = 10.0


def make_discretization(resolution: int, dimension: int, cfg: SolverConfig) -> Discretization:
    """Discretization object for a solver configuration."""
    if cfg.mode == FD_HARMONIC:
        if dimension != 1:
            raise ValidationError("fd-harmonic requires N = 1", field="mode", value=cfg.mode)
        return HalfCellGrid(resolution)
    return SpectralGrid(resolution, dimension, dealias=cfg.dealias)


def discretization_for(field: CoefficientField, cfg: SolverConfig) -> Discretization:
    return make_discretization(field.resolution, field.dimension, cfg)


def _check_direction(field: CoefficientField, k: int) -> None:
    if not 0 <= k < field.dimension:
        raise ValidationError(f"Direction {k + 1} outside 1..{field.dimension}", field="k", value=k + 1)


def _check_solution_grid(disc: Discretization, solution: CellSolution) -> None:
    if solution.values.shape != disc.shape or solution.gradient.shape[:-1] != disc.quadrature_shape:
        raise GridMismatchError(
            "Cell solution does not match the discretization",
            expected=disc.shape,
            actual=solution.values.shape,
        )


def apply_shifted_operator(
    field: CoefficientField,
    phi: np.ndarray,
    eta: Sequence[float],
    dealias: bool = False,
) -> np.ndarray:
    """Apply A(η)φ = −(∂+iη)·[A(∂+iη)φ] on the cell grid.

    Args:
        field: Coefficient field.
        phi: Complex grid function on the field's grid.
        eta: Dual vector of length N.
        dealias: Form the coefficient product on the 3/2 grid.

    Returns:
        Complex grid function.

    Raises:
        GridMismatchError: φ and the field live on different grids.

    Example:
        >>> field = build_field(PresetSpec(kind="constant", phases=(1.0,)), 2, 8)
        >>> out = apply_shifted_operator(field, np.ones((8, 8)), [0.3, 0.0])
        >>> np.allclose(out, 0.09)
        True
    """
    phi = np.asarray(phi)
    if phi.shape != field.grid_shape:
        raise GridMismatchError("Grid function does not match the field", field.grid_shape, phi.shape)
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (field.dimension,):
        raise ValidationError("η must have one entry per dimension", field="eta", value=eta.tolist())
    grid = SpectralGrid(field.resolution, field.dimension, dealias=dealias)
    coeff_q = grid.quadrature_coefficients(field)
    return grid.apply_operator(coeff_q, phi.astype(complex), eta)


def solve_corrector(field: CoefficientField, k: int, cfg: SolverConfig) -> CellSolution:
    """Zero-mean χ_k with −div(A(∇χ_k + e_k)) = 0 to tolerance.

    ``k`` is 0-based here; reports and configs use 1..N.
    """
    _check_direction(field, k)
    disc = discretization_for(field, cfg)
    coeff_q = disc.quadrature_coefficients(field)
    source = np.ascontiguousarray(coeff_q[..., :, k])
    return disc.solve_flux_problem(coeff_q, source, cfg, direction=k, label=f"corrector[{k + 1}]")


def solve_correctors(
    field: CoefficientField,
    cfg: SolverConfig,
    kind: str = CHI,
    directions: Optional[Sequence[int]] = None,
) -> CorrectorSet:
    """Solve every direction (in parallel when allowed) into a CorrectorSet."""
    if kind not in (CHI, ZETA):
        raise ValidationError("Corrector kind must be chi or zeta", field="kind", value=kind)
    dirs = list(range(field.dimension)) if directions is None else list(directions)
    solutions = parallel_map(lambda k: solve_corrector(field, k, cfg), dirs)
    logger.info(
        "Solved %s correctors (N=%d, n=%d, %s): iterations %s",
        kind,
        field.dimension,
        field.resolution,
        cfg.mode,
        [s.iterations for s in solutions],
    )
    return CorrectorSet(kind=kind, mode=cfg.mode, dealias=cfg.dealias, tol=cfg.tol, solutions=solutions)


def _psi_source(disc: Discretization, field_b: CoefficientField, chi: CellSolution) -> np.ndarray:
    b_q = disc.quadrature_coefficients(field_b)
    total = chi.gradient.copy()
    total[..., chi.direction] += 1.0
    return -np.einsum("...ij,...j->...i", b_q, total)


def solve_psi(
    field_a: CoefficientField,
    field_b: CoefficientField,
    chi: CellSolution,
    cfg: SolverConfig,
) -> CellSolution:
    """Zero-mean ψ_k with div(A∇ψ_k − B(∇χ_k + e_k)) = 0 to tolerance.

    Raises:
        GridMismatchError: Fields or χ on different grids.
        StaleSolutionError: χ no longer solves its own cell problem.
    """
    if not field_a.same_grid(field_b):
        raise GridMismatchError("A and B fields differ in grid", field_a.values.shape, field_b.values.shape)
    disc = discretization_for(field_a, cfg)
    _check_solution_grid(disc, chi)
    a_q = disc.quadrature_coefficients(field_a)

    chi_residual = disc.relative_residual(a_q, chi.gradient, a_q[..., :, chi.direction])
    if chi_residual > STALE_FACTOR * cfg.tol:
        raise StaleSolutionError(
            f"Corrector {chi.direction + 1} residual {chi_residual:.3e} above tolerance",
            residual=chi_residual,
        )
    source = _psi_source(disc, field_b, chi)
    return disc.solve_flux_problem(
        a_q,
        source,
        cfg,
        direction=chi.direction,
        label=f"psi[{chi.direction + 1}]",
        reference=disc.flux_scale(a_q, source),
    )


def solve_psi_set(
    field_a: CoefficientField,
    field_b: CoefficientField,
    chis: CorrectorSet,
    cfg: SolverConfig,
) -> CorrectorSet:
    """ψ_k for every χ_k of ``chis``."""
    solutions = parallel_map(lambda chi: solve_psi(field_a, field_b, chi, cfg), chis.solutions)
    logger.info("Solved psi correctors: iterations %s", [s.iterations for s in solutions])
    return CorrectorSet(kind=PSI, mode=cfg.mode, dealias=cfg.dealias, tol=cfg.tol, solutions=solutions)


def psi_residual(
    field_a: CoefficientField,
    field_b: CoefficientField,
    chi: CellSolution,
    psi: CellSolution,
    cfg: SolverConfig,
) -> float:
    """Current residual of a stored ψ_k against its equation, on the scale of B(∇χ_k + e_k)."""
    disc = discretization_for(field_a, cfg)
    _check_solution_grid(disc, psi)
    a_q = disc.quadrature_coefficients(field_a)
    source = _psi_source(disc, field_b, chi)
    return disc.relative_residual(a_q, psi.gradient, source, disc.flux_scale(a_q, source))


def competitor_energy(
    field: CoefficientField,
    direction: Union[int, Sequence[float]],
    gradient_q: np.ndarray,
    cfg: SolverConfig,
) -> float:
    """∫A(∇w + λ)·(∇w + λ) for a trial gradient on the quadrature nodes.

    ``direction`` is either a 0-based axis k (λ = e_k) or a vector λ.
    """
    if isinstance(direction, (int, np.integer)):
        _check_direction(field, int(direction))
        lam = np.eye(field.dimension)[int(direction)]
    else:
        lam = np.asarray(direction, dtype=float)
    disc = discretization_for(field, cfg)
    coeff_q = disc.quadrature_coefficients(field)
    if gradient_q.shape[:-1] != disc.quadrature_shape:
        raise GridMismatchError("Trial gradient off the quadrature grid", disc.quadrature_shape, gradient_q.shape)
    total = np.array(gradient_q, dtype=float) + lam
    return float(np.mean(np.einsum("...i,...ij,...j->...", total, coeff_q, total)))


def trial_gradient(field: CoefficientField, values: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Discrete gradient of a trial scalar field on the quadrature nodes (Fourier path)."""
    disc = discretization_for(field, cfg)
    if not isinstance(disc, SpectralGrid):
        raise ValidationError("Trial gradients need the Fourier discretization", field="mode", value=cfg.mode)
    return disc.to_quadrature(disc.gradient(np.asarray(values, dtype=float)))


def residual_rows(correctors: CorrectorSet) -> List[dict]:
    """``kind,direction,iteration,residual`` rows for CSV export."""
    rows: List[dict] = []
    for solution in correctors.solutions:
        rows.extend(
            residual_history_rows(
                solution.history, kind=correctors.kind, direction=solution.direction + 1
            )
        )
    return rows
