"""
Closed-form 1D limits for piecewise-constant profiles.

In one dimension a(χ′ + 1) is constant, so

    a* = harmonic mean of a,   b* = harmonic mean of b,
    b# = (a*)² · mean over the common period of b(t·y)/a(y)².

The mean is taken exactly over the intervals between the breakpoints of a(y) and
b(t·y) on [0, q), t = p/q.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

import numpy as np

from blochhomog.exceptions import ValidationError
from blochhomog.homogenize1d.problem import breakpoints, scalar_profile
from blochhomog.microstructure.presets import PresetSpec
from blochhomog.utils.rational import FactorLike, as_fraction


@dataclass(frozen=True)
class Limits1D:
    astar: float
    bstar: float
    bsharp: float
    factor: Fraction = Fraction(1)

    def to_dict(self) -> Dict[str, float]:
        return {"astar": self.astar, "bstar": self.bstar, "bsharp": self.bsharp, "factor": str(self.factor)}


def _edges(points: List[Fraction], length: int) -> List[Fraction]:
    return sorted({Fraction(0), Fraction(length), *[p for p in points if 0 <= p <= length]})


def _segments(edges: List[Fraction]) -> Tuple[np.ndarray, np.ndarray]:
    """Midpoints and lengths of consecutive edges."""
    mids = np.array([float(lo + hi) / 2.0 for lo, hi in zip(edges[:-1], edges[1:])])
    lengths = np.array([float(hi - lo) for lo, hi in zip(edges[:-1], edges[1:])])
    return mids, lengths


def _piecewise(spec: PresetSpec, name: str) -> List[Fraction]:
    breaks = breakpoints(spec)
    if breaks is None:
        raise ValidationError(f"{name} profile is not piecewise constant", field=name, value=spec.kind)
    return breaks


def _mean(values: np.ndarray, lengths: np.ndarray, total: float) -> float:
    return float(np.sum(values * lengths) / total)


def analytic_1d_limits(a_spec: PresetSpec, b_spec: PresetSpec, factor: FactorLike = 1) -> Limits1D:
    """(a*, b*, b#) of 1D piecewise-constant profiles for a rational factor t.

    Raises:
        ValidationError: A profile is not piecewise constant.
        UnsupportedFactorError: t or a breakpoint is not a small-denominator rational.

    Example:
        >>> a = PresetSpec(kind="laminate", phases=(1.0, 4.0), fraction=0.5)
        >>> b = PresetSpec(kind="laminate", phases=(2.0, 1.0), fraction=0.5)
        >>> limits = analytic_1d_limits(a, b)
        >>> round(limits.astar, 12), round(limits.bstar, 12), round(limits.bsharp, 12)
        (1.6, 1.333333333333, 2.64)
    """
    t = as_fraction(factor)
    p, q = t.numerator, t.denominator
    a_breaks = _piecewise(a_spec, "a")
    b_breaks = _piecewise(b_spec, "b")

    a_mid, a_len = _segments(_edges(a_breaks, 1))
    b_mid, b_len = _segments(_edges(b_breaks, 1))
    astar = 1.0 / _mean(1.0 / scalar_profile(a_spec, a_mid), a_len, 1.0)
    bstar = 1.0 / _mean(1.0 / scalar_profile(b_spec, b_mid), b_len, 1.0)

    points = [j + beta for j in range(q) for beta in a_breaks]
    points += [(i + beta) / t for i in range(p) for beta in b_breaks]
    mids, lengths = _segments(_edges(points, q))
    ratio = scalar_profile(b_spec, float(t) * mids) / scalar_profile(a_spec, mids) ** 2
    bsharp = astar**2 * _mean(ratio, lengths, float(q))
    return Limits1D(astar=astar, bstar=bstar, bsharp=bsharp, factor=t)
