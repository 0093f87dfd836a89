"""
Min-max characterization of B#.

L_λ(w₁, w₂) = b(w₁ + λ·y, w₁ + λ·y) + a(w₁ + λ·y, w₂)

At w₁ = χ_λ the second term vanishes for every w₂ (χ_λ + λ·y is A-harmonic), and
L_λ(χ_λ, ψ_λ) = B#λ·λ.
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Sequence

import numpy as np

from blochhomog.core.models import CoefficientField, CorrectorSet
from blochhomog.exceptions import GridMismatchError, ValidationError
from blochhomog.tensors.assembly import check_compatible, coefficients_for


@dataclass
class LagrangianValue:
    value: float
    energy: float
    cross_term: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def lagrangian(
    a_q: np.ndarray,
    b_q: np.ndarray,
    lam: np.ndarray,
    grad_w1: np.ndarray,
    grad_w2: np.ndarray,
) -> LagrangianValue:
    """L_λ from gradients of w₁ and w₂ on quadrature nodes."""
    total = grad_w1 + lam
    energy = float(np.mean(np.einsum("...i,...ij,...j->...", total, b_q, total)))
    cross = float(np.mean(np.einsum("...i,...ij,...j->...", grad_w2, a_q, total)))
    return LagrangianValue(value=energy + cross, energy=energy, cross_term=cross)


def lagrangian_value(
    field_a: CoefficientField,
    field_b: CoefficientField,
    lam: Sequence[float],
    chi: CorrectorSet,
    psi: CorrectorSet,
) -> LagrangianValue:
    """L_λ(χ_λ, ψ_λ) with χ_λ = Σλ_kχ_k and ψ_λ = Σλ_kψ_k.

    Returns the value together with the cross term a(χ_λ + λ·y, ψ_λ), which must
    vanish to solver tolerance.
    """
    lam_arr = np.asarray(lam, dtype=float)
    if lam_arr.shape != (field_a.dimension,):
        raise ValidationError("λ must have one entry per dimension", field="lambda", value=list(lam))
    if not field_a.same_grid(field_b):
        raise GridMismatchError("A and B fields differ in grid", field_a.values.shape, field_b.values.shape)
    check_compatible(chi, psi)
    a_q = coefficients_for(field_a, chi)
    b_q = coefficients_for(field_b, chi)
    _, grad_chi = chi.combine(lam_arr)
    _, grad_psi = psi.combine(lam_arr)
    return lagrangian(a_q, b_q, lam_arr, grad_chi, grad_psi)


def lagrangian_with_trial(
    field_a: CoefficientField,
    field_b: CoefficientField,
    lam: Sequence[float],
    chi: CorrectorSet,
    trial_gradient_q: np.ndarray,
) -> LagrangianValue:
    """L_λ(χ_λ, w₂) for an arbitrary trial gradient ∇w₂; equals B#λ·λ for every w₂."""
    lam_arr = np.asarray(lam, dtype=float)
    a_q = coefficients_for(field_a, chi)
    b_q = coefficients_for(field_b, chi)
    if trial_gradient_q.shape != a_q.shape[:-1]:
        raise GridMismatchError("Trial gradient off the quadrature grid", a_q.shape[:-1], trial_gradient_q.shape)
    _, grad_chi = chi.combine(lam_arr)
    return lagrangian(a_q, b_q, lam_arr, grad_chi, trial_gradient_q)
