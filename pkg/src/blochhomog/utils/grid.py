"""
Grid helpers shared by presets, solvers and the Bloch transform.
"""

from typing import Tuple

import numpy as np


def cell_centers(n: int, dimension: int) -> np.ndarray:
    """Cell-centred points y_j = (j+½)/n on the unit torus, shape (n,)*N + (N,)."""
    axis = (np.arange(n) + 0.5) / n
    mesh = np.meshgrid(*([axis] * dimension), indexing="ij")
    return np.stack(mesh, axis=-1)


def grid_mean(values: np.ndarray, dimension: int) -> np.ndarray:
    """Average over the leading ``dimension`` spatial axes."""
    return values.mean(axis=tuple(range(dimension)))


def tile_periods(values: np.ndarray, periods: int, dimension: int) -> np.ndarray:
    """Repeat a periodic grid function ``periods`` times along each spatial axis."""
    reps: Tuple[int, ...] = (periods,) * dimension + (1,) * (values.ndim - dimension)
    return np.tile(values, reps)


def loglog_slope(eps: np.ndarray, errors: np.ndarray, floor: float = 1e-13) -> float:
    """Least-squares slope of log(error) against log(ε).

    Returns NaN when fewer than two points are usable or an error sits at the
    numerical floor (exact results carry no rate).
    """
    eps = np.asarray(eps, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if eps.size < 2 or np.any(~np.isfinite(errors)) or np.any(errors <= floor):
        return float("nan")
    slope, _ = np.polyfit(np.log(eps), np.log(errors), 1)
    return float(slope)
