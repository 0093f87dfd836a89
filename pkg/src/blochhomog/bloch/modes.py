"""
First Bloch eigenpairs of the shifted operators and the ν₁ map.

A(η)φ = −(∂+iη)·[A(∂+iη)φ] acts on periodic grid functions of the unit cell. The
lowest eigenpair is found by shifted inverse iteration: every step solves
(A(η)+σ)x = φ with the same FFT-preconditioned conjugate gradients used for the
cell problems. Vectors are normalized to mean|φ|² = 1 and the phase is fixed so
that the cell mean of φ is real and positive.
"""

from typing import Dict, List, Optional, Sequence

import numpy as np

from blochhomog.config import get_config
from blochhomog.core.constants import (
    COLLISION_GAP,
    FOURIER_GALERKIN,
    IMAG_TOL,
    MAX_OUTER_ITERATIONS,
    SHIFT_FACTOR,
)
from blochhomog.core.models import BlochMode, CoefficientField, SolverConfig
from blochhomog.exceptions import (
    ConvergenceError,
    GridMismatchError,
    HermiticityError,
    UnsupportedFactorError,
    ValidationError,
)
from blochhomog.logging_config import get_logger
from blochhomog.microstructure.resample import resample_periodic
from blochhomog.solver.pcg import conjugate_gradient
from blochhomog.solver.spectral import SpectralGrid
from blochhomog.utils.parallel import parallel_map
from blochhomog.utils.rational import FactorLike, as_fraction

logger = get_logger(__name__)

# Inner solves must be tighter than the eigenvalue tolerance needs
INNER_TOL = 1e-13
VECTOR_TOL = 1e-11
# Contraction-based gap estimates need a measurable change
_GAP_MIN_CHANGE = 1e-12
_GAP_MIN_PREVIOUS = 1e-6
_PHASE_FLOOR = 1e-8


def check_eta(eta: Sequence[float], dimension: int) -> np.ndarray:
    """η as a float vector inside the first dual cell [−π, π]^N."""
    eta = np.asarray(eta, dtype=float).reshape(-1)
    if eta.shape != (dimension,):
        raise ValidationError("η must have one entry per dimension", field="eta", value=eta.tolist())
    if np.any(np.abs(eta) > np.pi * (1.0 + 1e-12)):
        raise ValidationError("η outside the first dual cell", field="eta", value=eta.tolist())
    return eta


def fix_phase(phi: np.ndarray) -> np.ndarray:
    """Rotate φ so its mean is real positive (largest entry real if the mean vanishes)."""
    mean = complex(np.mean(phi))
    if abs(mean) > _PHASE_FLOOR:
        return phi * (np.conj(mean) / abs(mean))
    pivot = phi.flat[int(np.argmax(np.abs(phi)))]
    return phi * (np.conj(pivot) / abs(pivot))


def normalize(phi: np.ndarray) -> np.ndarray:
    return phi / np.sqrt(np.mean(np.abs(phi) ** 2))


def _rms(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.abs(values) ** 2)))


def _bloch_grid(field: CoefficientField, cfg: SolverConfig) -> SpectralGrid:
    if cfg.mode != FOURIER_GALERKIN:
        raise ValidationError("Bloch modes need the Fourier discretization", field="mode", value=cfg.mode)
    return SpectralGrid(field.resolution, field.dimension, dealias=cfg.dealias)


def shifted_form(grid: SpectralGrid, coeff_q: np.ndarray, phi: np.ndarray, eta: np.ndarray) -> complex:
    """mean over quadrature nodes of conj(∇φ+iηφ)·A(∇φ+iηφ)."""
    grad = grid.to_quadrature(grid.gradient(phi, eta))
    return complex(np.mean(np.einsum("...i,...ij,...j->...", np.conj(grad), coeff_q, grad)))


def smallest_bloch_mode(
    field: CoefficientField,
    eta: Sequence[float],
    cfg: Optional[SolverConfig] = None,
    eigen_tol: Optional[float] = None,
) -> BlochMode:
    """Lowest eigenpair (λ₁(η), φ₁(·;η)) of the shifted operator.

    Args:
        field: Coefficient field (A for λ₁, B for μ₁).
        eta: Dual vector in the first dual cell.
        cfg: Solver configuration; only the Fourier discretization applies.
        eigen_tol: Relative change of λ that stops the iteration (default from
            BLOCH_HOMOG_EIGEN_TOL); the vector change must also fall below it
            or VECTOR_TOL, whichever is larger.

    Returns:
        BlochMode with the normalized, phase-fixed eigenvector.

    Raises:
        ConvergenceError: Inner solve or outer iteration did not converge.
        ValidationError: η outside the first dual cell or fd-harmonic requested.

    Example:
        >>> field = build_field(PresetSpec(kind="constant", phases=(1.0,)), 2, 16)
        >>> round(smallest_bloch_mode(field, [0.3, 0.0]).eigenvalue, 12)
        0.09
    """
    cfg = cfg or SolverConfig.from_defaults()
    eta = check_eta(eta, field.dimension)
    tol = eigen_tol if eigen_tol is not None else get_config().bloch.eigen_tol

    grid = _bloch_grid(field, cfg)
    coeff_q = grid.quadrature_coefficients(field)
    scale = grid.coefficient_scale(coeff_q)
    shift = SHIFT_FACTOR * scale
    precond = grid.preconditioner(scale, eta, shift=shift)

    def shifted(u: np.ndarray) -> np.ndarray:
        return grid.apply_operator(coeff_q, u, eta) + shift * u

    label = "bloch[" + ",".join(f"{e:.4g}" for e in eta) + "]"
    phi = np.ones(grid.shape, dtype=complex)
    lam = shifted_form(grid, coeff_q, phi, eta).real
    floor = np.finfo(float).eps * scale
    # Loose eigenvalue tolerances relax the vector criterion too, never below VECTOR_TOL
    vector_tol = max(VECTOR_TOL, tol)
    changes: List[float] = []
    gap: Optional[float] = None

    for iteration in range(1, MAX_OUTER_ITERATIONS + 1):
        solved = conjugate_gradient(
            apply_op=shifted,
            rhs=phi,
            precondition=precond,
            tol=min(cfg.tol, INNER_TOL),
            max_iter=cfg.max_iter,
            label=label,
        )
        update = fix_phase(normalize(solved.solution))
        lam_next = shifted_form(grid, coeff_q, update, eta).real
        change = _rms(update - phi)
        changes.append(change)
        if len(changes) >= 2 and changes[-1] > _GAP_MIN_CHANGE and changes[-2] > _GAP_MIN_PREVIOUS:
            ratio = changes[-1] / changes[-2]
            if 0.0 < ratio < 1.0:
                gap = (lam_next + shift) / ratio - shift - lam_next

        converged = abs(lam_next - lam) <= tol * max(abs(lam_next), abs(lam), floor)
        phi, lam = update, lam_next
        if converged and change <= vector_tol:
            break
    else:
        raise ConvergenceError(
            f"{label}: inverse iteration stalled after {MAX_OUTER_ITERATIONS} steps",
            iterations=MAX_OUTER_ITERATIONS,
            residual=changes[-1] if changes else None,
        )

    residual = _rms(grid.apply_operator(coeff_q, phi, eta) - lam * phi)
    near_degenerate = gap is not None and gap <= COLLISION_GAP
    if near_degenerate:
        logger.warning("%s: second eigenvalue within %.1e of the first (gap %.3e)", label, COLLISION_GAP, gap)
    logger.debug("%s: λ = %.15e after %d steps, residual %.2e", label, lam, iteration, residual)
    return BlochMode(
        eta=eta,
        eigenvalue=float(lam),
        vector=phi,
        residual=residual,
        iterations=iteration,
        gap_estimate=None if gap is None else float(gap),
        near_degenerate=near_degenerate,
    )


def _real_form(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)):
        raise HermiticityError(f"{what} has imaginary part {value.imag:.3e}", imag_part=value.imag)
    return float(value.real)


def _mode_grid(field: CoefficientField, mode: BlochMode, eta: Optional[Sequence[float]], dealias: bool):
    if mode.vector.shape != field.grid_shape:
        raise GridMismatchError("Bloch mode and field on different grids", field.grid_shape, mode.vector.shape)
    eta_vec = check_eta(mode.eta if eta is None else eta, field.dimension)
    if not np.allclose(eta_vec, mode.eta, rtol=0.0, atol=1e-15):
        raise ValidationError("Bloch mode computed at a different η", field="eta", value=eta_vec.tolist())
    return SpectralGrid(field.resolution, field.dimension, dealias=dealias), eta_vec


def nu1(
    field_b: CoefficientField,
    mode: BlochMode,
    eta: Optional[Sequence[float]] = None,
    dealias: bool = False,
) -> float:
    """ν₁(η) = ∫ B(∇φ₁+iηφ₁)·conj(∇φ₁+iηφ₁) for the first Bloch mode of A.

    Raises:
        HermiticityError: Imaginary part above 1e-10.
        GridMismatchError: Mode and B on different grids.
    """
    grid, eta_vec = _mode_grid(field_b, mode, eta, dealias)
    b_q = grid.quadrature_coefficients(field_b)
    return _real_form(shifted_form(grid, b_q, mode.vector, eta_vec), "ν₁")


def nu1_twoscale(
    field_b: CoefficientField,
    mode: BlochMode,
    factor: FactorLike,
    dealias: bool = False,
) -> float:
    """ν₁ with B evaluated at t·y for an integer factor t."""
    frac = as_fraction(factor)
    if frac.denominator != 1:
        raise UnsupportedFactorError(factor)
    grid, eta_vec = _mode_grid(field_b, mode, None, dealias)
    b_q = resample_periodic(grid.quadrature_coefficients(field_b), frac, dimension=field_b.dimension)
    return _real_form(shifted_form(grid, b_q, mode.vector, eta_vec), "two-scale ν₁")


def mode_derivative_error(mode_h: BlochMode, mode_0: BlochMode, chi_values: np.ndarray, step: float) -> float:
    """RMS of (φ₁(·;h e_k) − φ₁(·;0))/h − i·χ_k."""
    difference = (mode_h.vector - mode_0.vector) / step - 1j * np.asarray(chi_values)
    return _rms(difference)


def dispersion(
    field_a: CoefficientField,
    field_b: CoefficientField,
    etas: Sequence[Sequence[float]],
    cfg: Optional[SolverConfig] = None,
    eigen_tol: Optional[float] = None,
) -> List[Dict[str, float]]:
    """Rows (eta_1..eta_N, lambda1, mu1, nu1) over the requested dual points."""
    cfg = cfg or SolverConfig.from_defaults()
    if not field_a.same_grid(field_b):
        raise GridMismatchError("A and B fields differ in grid", field_a.values.shape, field_b.values.shape)

    def sample(eta: Sequence[float]) -> Dict[str, float]:
        mode_a = smallest_bloch_mode(field_a, eta, cfg, eigen_tol)
        mode_b = smallest_bloch_mode(field_b, eta, cfg, eigen_tol)
        row = {f"eta_{k + 1}": float(v) for k, v in enumerate(mode_a.eta)}
        row["lambda1"] = mode_a.eigenvalue
        row["mu1"] = mode_b.eigenvalue
        row["nu1"] = nu1(field_b, mode_a, dealias=cfg.dealias)
        return row

    rows = parallel_map(sample, list(etas))
    logger.info("Sampled dispersion at %d dual points", len(rows))
    return rows


def dispersion_columns(dimension: int) -> List[str]:
    return [f"eta_{k + 1}" for k in range(dimension)] + ["lambda1", "mu1", "nu1"]

