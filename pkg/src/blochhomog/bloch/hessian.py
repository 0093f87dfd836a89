"""
Half-Hessians at η = 0 by central differences.

The first Bloch eigenvalues λ₁, μ₁ and the map ν₁ are analytic near 0 with a
vanishing value and gradient there; half their Hessians are A*, B* and B#.
"""

from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from blochhomog.bloch.modes import nu1, nu1_twoscale, smallest_bloch_mode
from blochhomog.config import get_config
from blochhomog.core.constants import HESSIAN_LAMBDA, HESSIAN_MU, HESSIAN_NU, HESSIAN_NU_TWOSCALE
from blochhomog.core.models import BlochMode, CoefficientField, HomogTensor, SolverConfig
from blochhomog.exceptions import EvaluationError, GridMismatchError, ValidationError
from blochhomog.logging_config import get_logger
from blochhomog.utils.parallel import parallel_map
from blochhomog.utils.rational import FactorLike

logger = get_logger(__name__)

ScalarMap = Callable[[np.ndarray], float]
Point = Tuple[float, ...]
ModePairs = Dict[Point, Tuple[BlochMode, BlochMode]]


def point_key(point: np.ndarray) -> Point:
    """Hashable form of a stencil point."""
    return tuple(float(v) for v in point)


def stencil_points(step: float, dimension: int) -> List[np.ndarray]:
    """The 2N² points ±h e_k and ±h(e_k ± e_l), k < l."""
    if step <= 0.0:
        raise ValidationError("Finite-difference step must be positive", field="fd_step", value=step)
    basis = np.eye(dimension)
    points: List[np.ndarray] = []
    for k in range(dimension):
        points += [step * basis[k], -step * basis[k]]
    for k in range(dimension):
        for l in range(k + 1, dimension):
            plus, minus = basis[k] + basis[l], basis[k] - basis[l]
            points += [step * plus, -step * plus, step * minus, -step * minus]
    return points


def _evaluate(f: ScalarMap, points: List[np.ndarray], threads: Optional[int]) -> Dict[Point, float]:
    def safe(point: np.ndarray) -> float:
        try:
            return float(f(point))
        except Exception as exc:
            at = point.tolist()
            raise EvaluationError(f"Evaluation failed at η = {at}: {exc}", point=at) from exc

    values = parallel_map(safe, points, threads=threads)
    return {point_key(p): v for p, v in zip(points, values)}


def hessian_at_zero(
    f: ScalarMap,
    step: float,
    dimension: int,
    f0: Optional[float] = None,
    provenance: str = HESSIAN_LAMBDA,
    resolution: int = 0,
    tol: float = 0.0,
    threads: Optional[int] = None,
) -> HomogTensor:
    """½·Hessian of f at 0 by second-order central differences.

    Args:
        f: Scalar map of an N-vector.
        step: Stencil step h.
        dimension: N.
        f0: f(0) if already known.
        provenance: Tag stored on the tensor.
        resolution: Cell resolution recorded on the tensor.
        tol: Tolerance recorded on the tensor.
        threads: Parallelism cap for the stencil evaluations.

    Returns:
        Symmetrized tensor; ``extras`` hold the step.

    Raises:
        EvaluationError: f failed at a stencil point.

    Example:
        >>> hessian_at_zero(lambda e: float(e @ e), 1e-3, 2).matrix
        array([[1., 0.],
               [0., 1.]])
    """
    points = stencil_points(step, dimension)
    values = _evaluate(f, points, threads)
    if f0 is None:
        f0 = _evaluate(f, [np.zeros(dimension)], threads)[point_key(np.zeros(dimension))]
    basis = np.eye(dimension)
    h2 = step * step

    def at(vector: np.ndarray) -> float:
        return values[point_key(step * vector)]

    raw = np.zeros((dimension, dimension))
    for k in range(dimension):
        raw[k, k] = (at(basis[k]) + at(-basis[k]) - 2.0 * f0) / (2.0 * h2)
        for l in range(k + 1, dimension):
            plus, minus = basis[k] + basis[l], basis[k] - basis[l]
            raw[k, l] = (at(plus) + at(-plus) - at(minus) - at(-minus)) / (8.0 * h2)
            raw[l, k] = raw[k, l]
    return HomogTensor.from_raw(raw, provenance, resolution, tol, extras={"fd_step": step, "f0": float(f0)})


def gradient_at_zero(f: ScalarMap, step: float, dimension: int, threads: Optional[int] = None) -> np.ndarray:
    """First-order central differences (f(h e_k) − f(−h e_k))/(2h)."""
    basis = np.eye(dimension)
    points = [sign * step * basis[k] for k in range(dimension) for sign in (1.0, -1.0)]
    values = _evaluate(f, points, threads)
    plus = [values[point_key(step * basis[k])] for k in range(dimension)]
    minus = [values[point_key(-step * basis[k])] for k in range(dimension)]
    return (np.array(plus) - np.array(minus)) / (2.0 * step)


def stencil_modes(
    field_a: CoefficientField,
    field_b: CoefficientField,
    cfg: Optional[SolverConfig] = None,
    step: Optional[float] = None,
    extra_points: Sequence[np.ndarray] = (),
    eigen_tol: Optional[float] = None,
) -> ModePairs:
    """First Bloch modes of A and B at 0, the stencil points and ``extra_points``."""
    cfg = cfg or SolverConfig.from_defaults()
    step = step if step is not None else get_config().bloch.fd_step
    if not field_a.same_grid(field_b):
        raise GridMismatchError("A and B fields differ in grid", field_a.values.shape, field_b.values.shape)
    dim = field_a.dimension
    points = [np.zeros(dim)] + stencil_points(step, dim) + [np.asarray(p, dtype=float) for p in extra_points]

    def modes_at(eta: np.ndarray) -> Tuple[BlochMode, BlochMode]:
        try:
            return (
                smallest_bloch_mode(field_a, eta, cfg, eigen_tol),
                smallest_bloch_mode(field_b, eta, cfg, eigen_tol),
            )
        except Exception as exc:
            raise EvaluationError(f"Bloch modes failed at η = {eta.tolist()}: {exc}", point=eta.tolist()) from exc

    pairs = dict(zip([point_key(p) for p in points], parallel_map(modes_at, points)))
    logger.info("Bloch modes of A and B at %d dual points", len(pairs))
    return pairs


def spectral_tensors(
    field_a: CoefficientField,
    field_b: CoefficientField,
    cfg: Optional[SolverConfig] = None,
    step: Optional[float] = None,
    modes: Optional[ModePairs] = None,
    eigen_tol: Optional[float] = None,
    twoscale_factor: Optional[FactorLike] = None,
) -> Dict[str, HomogTensor]:
    """Half-Hessians of λ₁, μ₁ and ν₁ at 0.

    Returns a mapping keyed by provenance (hessian-lambda1, hessian-mu1, hessian-nu1);
    ``extras["f0"]`` holds the value at η = 0. An integer ``twoscale_factor`` t adds
    hessian-nu1-twoscale, the half-Hessian of ν₁ with B evaluated at t·y.
    """
    cfg = cfg or SolverConfig.from_defaults()
    step = step if step is not None else get_config().bloch.fd_step
    pairs = modes if modes is not None else stencil_modes(field_a, field_b, cfg, step, eigen_tol=eigen_tol)
    dim = field_a.dimension
    maps: Dict[str, ScalarMap] = {
        HESSIAN_LAMBDA: lambda eta: pairs[point_key(eta)][0].eigenvalue,
        HESSIAN_MU: lambda eta: pairs[point_key(eta)][1].eigenvalue,
        HESSIAN_NU: lambda eta: nu1(field_b, pairs[point_key(eta)][0], dealias=cfg.dealias),
    }
    if twoscale_factor is not None:
        factor = twoscale_factor
        maps[HESSIAN_NU_TWOSCALE] = lambda eta: nu1_twoscale(
            field_b, pairs[point_key(eta)][0], factor, dealias=cfg.dealias
        )
    tensors = {}
    for provenance, f in maps.items():
        tensors[provenance] = hessian_at_zero(
            f,
            step,
            dim,
            f0=f(np.zeros(dim)),
            provenance=provenance,
            resolution=field_a.resolution,
            tol=cfg.tol,
            threads=1,
        )
    return tensors
