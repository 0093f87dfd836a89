"""
Utility modules for blochhomog.

Rational scale factors, grid helpers, parallel map and report writers.
"""

from blochhomog.utils.grid import cell_centers, grid_mean, loglog_slope, tile_periods
from blochhomog.utils.parallel import parallel_map
from blochhomog.utils.rational import as_fraction, parse_eps

__all__ = [
    "as_fraction",
    "parse_eps",
    "cell_centers",
    "grid_mean",
    "loglog_slope",
    "tile_periods",
    "parallel_map",
]
