"""
Rational Scale Factor Utilities

Two-scale quadrature is only exact for commensurate scales, so every scale factor is
reduced to a fraction p/q with a small denominator before use.
"""

import math
from fractions import Fraction
from typing import Union

from blochhomog.core.constants import FACTOR_MATCH_TOL, MAX_FACTOR_DENOMINATOR
from blochhomog.exceptions import UnsupportedFactorError

FactorLike = Union[int, float, str, Fraction]


def as_fraction(factor: FactorLike, max_denominator: int = MAX_FACTOR_DENOMINATOR) -> Fraction:
    """Convert a scale factor to a positive small-denominator fraction.

    Accepts ints, ``Fraction`` instances, strings such as ``"3/2"`` or ``"0.5"`` and
    floats that are (to 1e-12) a fraction with denominator at most
    ``max_denominator``.

    Args:
        factor: Scale factor to convert.
        max_denominator: Largest admissible denominator.

    Returns:
        Reduced positive fraction.

    Raises:
        UnsupportedFactorError: For non-positive, non-finite or irrational-looking input.

    Example:
        >>> as_fraction("3/2")
        Fraction(3, 2)
        >>> as_fraction(0.25)
        Fraction(1, 4)
    """
    if isinstance(factor, bool):
        raise UnsupportedFactorError(factor)

    if isinstance(factor, Fraction):
        frac = factor
    elif isinstance(factor, int):
        frac = Fraction(factor)
    elif isinstance(factor, str):
        try:
            frac = Fraction(factor.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UnsupportedFactorError(factor) from exc
    else:
        try:
            value = float(factor)
        except (TypeError, ValueError) as exc:
            raise UnsupportedFactorError(factor) from exc
        if not math.isfinite(value):
            raise UnsupportedFactorError(factor)
        frac = Fraction(value).limit_denominator(max_denominator)
        if abs(float(frac) - value) > FACTOR_MATCH_TOL * max(1.0, abs(value)):
            raise UnsupportedFactorError(factor)

    if frac <= 0 or frac.denominator > max_denominator:
        raise UnsupportedFactorError(factor)
    return frac


def parse_eps(value: FactorLike) -> Fraction:
    """Parse an ε entry (``"1/8"``, ``0.125`` or a cell count such as ``8``).

    Values above one are read as the number of cells M and mapped to 1/M.
    """
    frac = as_fraction(value, max_denominator=1 << 20)
    if frac > 1:
        frac = 1 / frac
    if frac.numerator != 1:
        raise UnsupportedFactorError(value)
    return frac
