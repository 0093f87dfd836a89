"""
B# for coefficients periodic at two commensurate scales.

t-mode:  b#_jk = ∫ b(t·y) (∇χ_k + e_k)·(∇χ_j + e_j)
s-mode:  b#_jk = ∫ b(y) (∇χ_k + e_k)(s·y)·(∇χ_j + e_j)(s·y)

For a factor p/q the integrand has period q, so the mean is taken over q unit cells.
In s-mode the gradient products are formed first and resampled as fields (no chain
rule factor), which keeps the quadrature exact on piecewise-constant data.
"""

from typing import Optional

import numpy as np

from blochhomog.core.constants import BSHARP_TWOSCALE_S, BSHARP_TWOSCALE_T, CHI
from blochhomog.core.models import CoefficientField, CorrectorSet, HomogTensor, SolverConfig
from blochhomog.exceptions import ValidationError
from blochhomog.logging_config import get_logger
from blochhomog.microstructure.presets import PresetSpec, build_field
from blochhomog.microstructure.resample import resample_periodic
from blochhomog.solver.cell import solve_correctors
from blochhomog.tensors.assembly import coefficients_for, quadratic_tensor
from blochhomog.utils.grid import tile_periods
from blochhomog.utils.rational import FactorLike, as_fraction

logger = get_logger(__name__)

T_MODES = ("t", "t-ratio")
S_MODES = ("s", "s-ratio")


def normalize_mode(mode: str) -> str:
    if mode in T_MODES:
        return "t"
    if mode in S_MODES:
        return "s"
    raise ValidationError(f"Unknown two-scale mode {mode!r}", field="twoscale.mode", value=mode)


def twoscale_from_correctors(
    field_b: CoefficientField,
    chi: CorrectorSet,
    mode: str,
    factor: FactorLike,
) -> HomogTensor:
    """Two-scale B# from already solved correctors of A."""
    if chi.kind != CHI:
        raise ValidationError("Two-scale B# needs the correctors of A", field="kind", value=chi.kind)
    kind = normalize_mode(mode)
    frac = as_fraction(factor)
    periods = frac.denominator
    dim = field_b.dimension

    b_q = coefficients_for(field_b, chi)
    total = chi.total_gradients()

    if kind == "t":
        b_scaled = resample_periodic(b_q, frac, dimension=dim, periods=periods)
        moved = np.moveaxis(total, 0, -2)
        tiled = np.moveaxis(tile_periods(moved, periods, dim), -2, 0)
        raw = quadratic_tensor(b_scaled, tiled, tiled)
        provenance = BSHARP_TWOSCALE_T
    else:
        moved = np.moveaxis(total, 0, -2)  # (*nodes, K, N)
        products = moved[..., :, None, :, None] * moved[..., None, :, None, :]
        scaled = resample_periodic(products, frac, dimension=dim, periods=periods)
        b_tiled = tile_periods(b_q, periods, dim)
        nodes = int(np.prod(b_tiled.shape[:dim]))
        flat_b = b_tiled.reshape(nodes, dim, dim)
        flat_p = scaled.reshape((nodes,) + scaled.shape[dim:])
        raw = np.einsum("qil,qjkil->jk", flat_b, flat_p) / nodes
        provenance = BSHARP_TWOSCALE_S

    logger.debug("Two-scale %s-mode with factor %s over %d periods", kind, frac, periods)
    return HomogTensor.from_raw(
        raw,
        provenance,
        chi.resolution,
        chi.tol,
        extras={"factor": str(frac), "periods": periods},
    )


def assemble_bsharp_twoscale(
    spec_a: PresetSpec,
    spec_b: PresetSpec,
    mode: str,
    factor: FactorLike,
    resolution: int,
    dimension: int = 1,
    cfg: Optional[SolverConfig] = None,
) -> HomogTensor:
    """Build both fields, solve the correctors of A and assemble two-scale B#.

    Args:
        spec_a: Preset of A.
        spec_b: Preset of B.
        mode: ``"t"``/``"t-ratio"`` or ``"s"``/``"s-ratio"``.
        factor: Positive rational scale ratio.
        resolution: Cell grid points per axis.
        dimension: N.
        cfg: Solver configuration (environment defaults if omitted).

    Returns:
        Symmetrized tensor tagged Bsharp-twoscale-t or Bsharp-twoscale-s.

    Raises:
        UnsupportedFactorError: Factor not a small-denominator rational.
    """
    frac = as_fraction(factor)
    normalize_mode(mode)
    cfg = cfg or SolverConfig.from_defaults()
    field_a = build_field(spec_a, dimension, resolution)
    field_b = build_field(spec_b, dimension, resolution)
    chi = solve_correctors(field_a, cfg)
    return twoscale_from_correctors(field_b, chi, mode, frac)
