"""
Periodic resampling g(y) -> g(t·y) for rational t = p/q.

Grid values are read as cell averages of a piecewise-constant function. Each source
cell is split into q subcells; target cell j of g(t·y) then covers subcells
p·j … p·j+p−1 (mod n·q) exactly, so the result is the exact cell average of the
composed function. Over ``periods`` unit cells the output has ``periods·n`` cells per
axis; with t = p/q, ``periods = q`` is the least common period of g and g(t·).
"""

import numpy as np

from blochhomog.core.constants import MAX_REFINED_POINTS_PER_AXIS
from blochhomog.exceptions import ValidationError
from blochhomog.utils.rational import FactorLike, as_fraction


def resample_periodic(
    gridfn: np.ndarray,
    factor: FactorLike,
    dimension: int = 0,
    periods: int = 1,
) -> np.ndarray:
    """Sample g(t·y) on the torus.

    Args:
        gridfn: Grid function whose leading ``dimension`` axes are spatial; trailing
            axes (matrix or vector components) are carried along.
        factor: Positive rational t.
        dimension: Number of spatial axes (default: all axes).
        periods: Number of unit cells covered by the output per axis.

    Returns:
        Array with ``periods·n`` cells per spatial axis.

    Raises:
        UnsupportedFactorError: Factor not a small-denominator rational.
        ValidationError: Refined grid too large.

    Example:
        >>> resample_periodic(np.array([2.0, 2, 2, 2, 1, 1, 1, 1]), 2)
        array([2., 2., 1., 1., 2., 2., 1., 1.])
    """
    frac = as_fraction(factor)
    p, q = frac.numerator, frac.denominator
    values = np.asarray(gridfn)
    dims = dimension or values.ndim
    if periods < 1:
        raise ValidationError("periods must be >= 1", field="periods", value=periods)

    result = values
    for axis in range(dims):
        n = result.shape[axis]
        refined = n * q
        if refined * max(p, periods) > MAX_REFINED_POINTS_PER_AXIS:
            raise ValidationError(
                f"Resolution {n} not refinable for factor {frac}", field="factor", value=str(frac)
            )
        fine = np.repeat(result, q, axis=axis) if q > 1 else result
        total = n * periods
        index = (p * np.arange(total)[:, None] + np.arange(p)[None, :]) % refined
        taken = np.take(fine, index.ravel(), axis=axis)
        split = taken.shape[:axis] + (total, p) + taken.shape[axis + 1:]
        result = taken.reshape(split).mean(axis=axis + 1)
    return result
