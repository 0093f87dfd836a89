"""
Bound chain for the homogenized tensors:

    b₁I ≤ B̲ ≤ B* ≤ B# ≤ (b₂/a₁)A* ≤ (b₂/a₁)A̅ ≤ b₂(a₂/a₁)I

with B̲ = inv(mean(B⁻¹)) and A̅ = mean(A). A link passes when the smallest
eigenvalue of the symmetrized difference is ≥ −1e-8. The lower link
(b₁/a₂)A* ≤ B# is reported alongside as a supplementary entry.
"""

from typing import List, Optional, Tuple

import numpy as np

from blochhomog.core.constants import PSD_TOL
from blochhomog.core.models import BoundLink, BoundsReport, CoefficientField, HomogTensor
from blochhomog.exceptions import GridMismatchError
from blochhomog.microstructure.validation import cell_average, harmonic_average


def psd_margin(lower: np.ndarray, upper: np.ndarray) -> float:
    """Smallest eigenvalue of sym(upper − lower)."""
    diff = np.asarray(upper, dtype=float) - np.asarray(lower, dtype=float)
    return float(np.linalg.eigvalsh(0.5 * (diff + diff.T))[0])


def check_bounds(
    field_a: CoefficientField,
    field_b: CoefficientField,
    astar: HomogTensor,
    bstar: HomogTensor,
    bsharp: HomogTensor,
    a1: Optional[float] = None,
    a2: Optional[float] = None,
    b1: Optional[float] = None,
    b2: Optional[float] = None,
) -> BoundsReport:
    """Evaluate every link of the chain.

    Missing constants default to the fields' declared ellipticity bounds.

    Raises:
        ValidationError: mean(B⁻¹) singular.
        GridMismatchError: Tensors of different dimension than the fields.
    """
    dim = field_a.dimension
    for tensor in (astar, bstar, bsharp):
        if tensor.dimension != dim:
            raise GridMismatchError("Tensor dimension differs from the fields", dim, tensor.dimension)
    a1 = field_a.alpha if a1 is None else a1
    a2 = field_a.beta if a2 is None else a2
    b1 = field_b.alpha if b1 is None else b1
    b2 = field_b.beta if b2 is None else b2

    b_harm = harmonic_average(field_b)
    a_mean = cell_average(field_a)
    eye = np.eye(dim)
    ratio = b2 / a1

    chain: List[Tuple[str, np.ndarray]] = [
        ("b1*I", b1 * eye),
        ("B_harmonic", b_harm),
        ("Bstar", bstar.matrix),
        ("Bsharp", bsharp.matrix),
        ("(b2/a1)*Astar", ratio * astar.matrix),
        ("(b2/a1)*A_mean", ratio * a_mean),
        ("b2*(a2/a1)*I", b2 * (a2 / a1) * eye),
    ]
    links = []
    for (low_name, low), (high_name, high) in zip(chain[:-1], chain[1:]):
        margin = psd_margin(low, high)
        passed = margin >= -PSD_TOL
        links.append(BoundLink(name=f"{low_name} <= {high_name}", min_eigenvalue=margin, passed=passed))

    margin = psd_margin((b1 / a2) * astar.matrix, bsharp.matrix)
    links.append(
        BoundLink(
            name="(b1/a2)*Astar <= Bsharp",
            min_eigenvalue=margin,
            passed=margin >= -PSD_TOL,
            supplementary=True,
        )
    )
    return BoundsReport(lower_harmonic=b_harm, upper_mean=a_mean, links=links)
