"""
Preconditioned conjugate gradients for Hermitian (semi)definite grid operators.

Operators, preconditioners and the optional kernel projection act on whole grid
arrays. Progress is measured in the preconditioner-weighted norm sqrt(r·M⁻¹r)
relative to the same norm of the right-hand side; for the FFT Laplacian
preconditioner this is the H⁻¹ size of the divergence residual.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from blochhomog.exceptions import ConvergenceError
from blochhomog.logging_config import get_logger

logger = get_logger(__name__)

GridOperator = Callable[[np.ndarray], np.ndarray]

_LOG_EVERY = 25


@dataclass
class PCGResult:
    solution: np.ndarray
    iterations: int
    residual: float
    history: List[float] = field(default_factory=list)


def _inner(u: np.ndarray, v: np.ndarray) -> float:
    return float(np.real(np.vdot(u, v)))


def conjugate_gradient(
    apply_op: GridOperator,
    rhs: np.ndarray,
    precondition: GridOperator,
    tol: float,
    max_iter: int,
    project: Optional[GridOperator] = None,
    label: str = "pcg",
    reference: Optional[float] = None,
) -> PCGResult:
    """Solve ``apply_op(x) = rhs`` starting from x = 0.

    Args:
        apply_op: Hermitian positive (semi)definite operator.
        rhs: Right-hand side, compatible with the operator kernel.
        precondition: Hermitian positive approximation of the inverse.
        tol: Relative tolerance in the preconditioned residual norm.
        max_iter: Iteration cap.
        project: Projection removing the operator kernel, applied to every iterate
            and residual.
        label: Name used in log messages.
        reference: Norm the residual is measured against instead of the
            preconditioned norm of ``rhs``. Must not be smaller than that norm.

    Returns:
        Solution, iteration count, final relative residual and residual history.

    Raises:
        ConvergenceError: Tolerance not reached within ``max_iter`` iterations.
    """
    identity: GridOperator = lambda u: u  # noqa: E731
    proj = project or identity

    rhs = proj(rhs)
    x = np.zeros_like(rhs)
    r = rhs.copy()
    z = proj(precondition(r))
    rz = _inner(r, z)
    initial = np.sqrt(max(rz, 0.0))
    if initial == 0.0:
        return PCGResult(solution=x, iterations=0, residual=0.0, history=[0.0])
    if reference is None:
        reference = initial

    history = [float(initial / reference)]
    if history[0] <= tol:
        return PCGResult(solution=x, iterations=0, residual=history[0], history=history)
    d = z.copy()
    for iteration in range(1, max_iter + 1):
        ad = apply_op(d)
        curvature = _inner(d, ad)
        if curvature <= 0.0:
            raise ConvergenceError(
                f"{label}: operator lost positivity (d·Ad = {curvature:.3e})",
                iterations=iteration,
                residual=history[-1],
            )
        alpha = rz / curvature
        x = proj(x + alpha * d)
        r = proj(r - alpha * ad)
        z = proj(precondition(r))
        rz_next = _inner(r, z)
        relative = np.sqrt(max(rz_next, 0.0)) / reference
        history.append(float(relative))
        if iteration % _LOG_EVERY == 0:
            logger.debug("%s: iteration %d residual %.3e", label, iteration, relative)
        if relative <= tol:
            return PCGResult(solution=x, iterations=iteration, residual=float(relative), history=history)
        d = z + (rz_next / rz) * d
        rz = rz_next

    raise ConvergenceError(
        f"{label}: no convergence in {max_iter} iterations (residual {history[-1]:.3e})",
        iterations=max_iter,
        residual=history[-1],
    )
