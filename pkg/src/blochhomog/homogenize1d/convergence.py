"""
Flux convergence over a dyadic sequence of ε.

For every ε the state and adjoint solutions are compared with the homogenized
problems −(a* u′)′ = f and (a* p′ − β u′)′ = 0 solved on the same mesh, where β is
b# (or b* for the negative control). Weak limits are measured through
antiderivatives: ‖∫₀ˣ (g^ε − g)‖_L² for each quantity g.
"""

from typing import Dict, List, Optional, Sequence

import numpy as np

from blochhomog.core.models import ConvergenceTable
from blochhomog.exceptions import ValidationError
from blochhomog.homogenize1d.limits import Limits1D, analytic_1d_limits
from blochhomog.homogenize1d.problem import MIN_CELL_RESOLUTION, EpsilonProblem, Source
from blochhomog.homogenize1d.solvers import solve_adjoint, solve_adjoint_1d, solve_state, solve_state_1d
from blochhomog.logging_config import get_logger
from blochhomog.microstructure.presets import PresetSpec
from blochhomog.utils.grid import loglog_slope
from blochhomog.utils.parallel import parallel_map
from blochhomog.utils.rational import FactorLike, as_fraction

logger = get_logger(__name__)

LIMIT_BSHARP = "bsharp"
LIMIT_BSTAR = "bstar"

CONVERGENCE_COLUMNS: List[str] = ["eps", "errU", "errSigma", "errZ", "errP", "errEnergy"]
MIN_EPS_COUNT = 4


def antiderivative_norm(element_values: np.ndarray, h: float) -> float:
    """L² norm over (0, 1) of the nodal antiderivative of element-constant data."""
    running = np.concatenate([[0.0], np.cumsum(element_values * h)])
    return float(np.sqrt(np.mean(running**2)))


def _element_means(nodal: np.ndarray) -> np.ndarray:
    return 0.5 * (nodal[:-1] + nodal[1:])


def _check_cells(cells_list: Sequence[int]) -> List[int]:
    cells = [int(m) for m in cells_list]
    if len(cells) < MIN_EPS_COUNT:
        raise ValidationError(f"Need at least {MIN_EPS_COUNT} values of ε", field="eps", value=cells)
    if len(set(cells)) != len(cells):
        raise ValidationError("Repeated ε values", field="eps", value=cells)
    for m in cells:
        if m < 1 or m & (m - 1):
            raise ValidationError("ε must be dyadic (1/2^k)", field="eps", value=m)
    return sorted(cells)


def epsilon_row(
    prob: EpsilonProblem,
    limits: Limits1D,
    macro: float,
) -> Dict[str, float]:
    """Errors of one ε against the homogenized solutions with macro coefficient ``macro``."""
    h = prob.h
    state = solve_state_1d(prob)
    adjoint = solve_adjoint_1d(prob, state)

    a_limit = np.full(prob.elements, limits.astar)
    u0 = solve_state(a_limit, prob.load_vector(), h)
    slopes0 = np.diff(u0) / h
    sigma0 = limits.astar * slopes0
    p0 = solve_adjoint(a_limit, np.full(prob.elements, macro), slopes0, h).p
    z_pred = limits.astar * np.diff(p0) / h - limits.bsharp * slopes0

    energy = float(np.sum(prob.b_segments() * state.slopes**2) * h)
    energy0 = float(np.sum(macro * slopes0**2) * h)
    return {
        "eps": prob.eps,
        "errU": antiderivative_norm(_element_means(state.u - u0), h),
        "errSigma": antiderivative_norm(state.sigma - sigma0, h),
        "errZ": antiderivative_norm(adjoint.z - z_pred, h),
        "errP": antiderivative_norm(_element_means(adjoint.p - p0), h),
        "errEnergy": abs(energy - energy0),
        "zSpread": adjoint.z_spread,
    }


def flux_convergence(
    a_spec: PresetSpec,
    b_spec: PresetSpec,
    factor: FactorLike,
    cells_list: Sequence[int],
    source: Source = 1.0,
    cell_resolution: int = MIN_CELL_RESOLUTION,
    limit: str = LIMIT_BSHARP,
    limits: Optional[Limits1D] = None,
) -> ConvergenceTable:
    """Convergence table of the 1D state/adjoint fluxes over ε = 1/M.

    Args:
        a_spec: Profile of a.
        b_spec: Profile of b.
        factor: Rational scale factor t of b.
        cells_list: Dyadic cell counts M (at least four).
        source: Constant or callable f on (0, 1).
        cell_resolution: Elements per ε-cell.
        limit: ``"bsharp"`` or ``"bstar"`` (negative control) as macro coefficient.
        limits: Precomputed (a*, b*, b#); computed analytically when omitted.

    Returns:
        Table with columns eps, errU, errSigma, errZ, errP, errEnergy, zSpread and
        log-log slopes of the error columns.

    Raises:
        ValidationError: Fewer than four or non-dyadic ε, jumps off the grid faces.
    """
    if limit not in (LIMIT_BSHARP, LIMIT_BSTAR):
        raise ValidationError(f"Unknown limit coefficient {limit!r}", field="limit", value=limit)
    t = as_fraction(factor)
    cells = _check_cells(cells_list)
    limits = limits or analytic_1d_limits(a_spec, b_spec, t)
    macro = limits.bsharp if limit == LIMIT_BSHARP else limits.bstar

    problems = [EpsilonProblem(a_spec, b_spec, m, t, cell_resolution, source) for m in cells]
    rows = parallel_map(lambda prob: epsilon_row(prob, limits, macro), problems)
    rows.sort(key=lambda row: -row["eps"])

    table = ConvergenceTable(columns=CONVERGENCE_COLUMNS + ["zSpread"], rows=rows)
    eps = table.column("eps")
    for name in CONVERGENCE_COLUMNS[1:]:
        table.slopes[name] = loglog_slope(eps, table.column(name))
    logger.info(
        "Flux convergence (%s, t=%s): slopes %s",
        limit,
        t,
        {k: round(v, 3) for k, v in table.slopes.items()},
    )
    return table
